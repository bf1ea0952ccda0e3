#include "sl2pd/algebra.hpp"
#include "sl2pd/catalog.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace sl2pd;

namespace {

ModelSpec dicke(int n_atoms, int n = 1) {
    ModelSpec m;
    m.family = Family::Dicke;
    m.n = n;
    m.n_atoms = n_atoms;
    m.omegas = {Scalar(1)};
    m.epsilon = Scalar(1);
    m.g_prime = {0.3, 0.0};
    return m;
}

ModelSpec two_mode(int m, int n) {
    ModelSpec s;
    s.family = Family::TwoMode;
    s.m = m;
    s.n = n;
    s.omegas = {Scalar(1), Scalar(1)};
    s.g_prime = {0.2, 0.0};
    return s;
}

} // namespace

TEST(Polynomial, HornerAndShift) {
    Polynomial p({1.0, -3.0, 2.0});  // 2x^2 - 3x + 1
    EXPECT_DOUBLE_EQ(p(2.0), 3.0);
    Polynomial q = p.shifted(1.5);
    for (double x : {-1.0, 0.0, 0.7, 2.0}) EXPECT_NEAR(q(x), p(x + 1.5), 1e-12);
}

TEST(Polynomial, DivisionRecoversFactors) {
    Polynomial a({2.0, 1.0});
    Polynomial b({-1.0, 3.0, 1.0});
    auto [q, r] = divide(a * b, a);
    for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(q[k], b[k], 1e-14);
    EXPECT_LT(r.max_abs_coeff(), 1e-14);
}

TEST(Polynomial, FallingPower) {
    // (2x+3)^(3) = (2x+3)(2x+2)(2x+1)
    Polynomial p = falling_power(2.0, 3.0, 3);
    const double x = 0.4;
    EXPECT_NEAR(p(x), (2 * x + 3) * (2 * x + 2) * (2 * x + 1), 1e-13);
}

TEST(EvalPsi, DickeSingleAtomValues) {
    // [3/4 - V0(V0-1)] [3/2 - V0]
    auto psi = build_psi(dicke(1), SectorLabels{1, 0, {}, Rational(1, 2)});
    EXPECT_NEAR(eval_psi(psi, -0.5), 0.0, 1e-14);
    EXPECT_NEAR(eval_psi(psi, 0.5), 1.0, 1e-14);
    EXPECT_EQ(psi.degree(), 3);
}

TEST(EvalPsi, TwoModeLinear) {
    auto psi = build_psi(two_mode(1, 1), SectorLabels{0, 2, {}, Rational(0)});
    EXPECT_NEAR(eval_psi(psi, 0.0), 2.0, 1e-14);
    EXPECT_EQ(psi.degree(), 2);
}

TEST(LadderNorm, Values) {
    auto psi1 = build_psi(dicke(1), SectorLabels{1, 0, {}, Rational(1, 2)});
    EXPECT_NEAR(ladder_norm(psi1, Rational(-1, 2), 0), 1.0, 1e-14);
    auto psi2 = build_psi(dicke(1), SectorLabels{2, 0, {}, Rational(1, 2)});
    EXPECT_NEAR(ladder_norm(psi2, Rational(-1, 2), 0), std::sqrt(2.0), 1e-14);
    EXPECT_NEAR(ladder_norm(psi1, Rational(-1, 2), 1), 0.0, 1e-8);
}

TEST(LadderNorm, NegativeIsAnError) {
    StructurePolynomial psi(Polynomial({-1.0, 0.0, 1.0}));  // x^2 - 1
    try {
        (void)ladder_norm(psi, Rational(-2), 0);  // Psi(-1) = 0 ok, so probe v with Psi(-0.5)
        (void)ladder_norm(psi, Rational(-3, 2), 0);
        FAIL() << "expected NegativeLadderNorm";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NegativeLadderNorm);
    }
}

TEST(PhiFromPsi, DickeAndLinear) {
    auto psi = build_psi(dicke(1), SectorLabels{1, 0, {}, Rational(1, 2)});
    auto phi = phi_from_psi(psi, Rational(-1, 2), Rational(1, 2), true);
    ASSERT_EQ(phi.degree(), 1);
    EXPECT_NEAR(phi.coeffs()[0], 0.5, 1e-12);
    EXPECT_NEAR(phi.coeffs()[1], -1.0, 1e-12);

    auto lin = build_psi(two_mode(1, 1), SectorLabels{0, 2, {}, Rational(0)});
    auto one = phi_from_psi(lin, Rational(-1), Rational(1), true);
    ASSERT_EQ(one.degree(), 0);
    EXPECT_NEAR(one.coeffs()[0], 1.0, 1e-12);
}

TEST(PhiFromPsi, InconsistentSpinRejected) {
    auto psi = build_psi(dicke(3), SectorLabels{3, 0, {}, Rational(3, 2)});
    try {
        (void)phi_from_psi(psi, Rational(-3, 2), Rational(1), true);
        FAIL() << "expected NonzeroRemainder";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NonzeroRemainder);
    }
}

TEST(PhiFromPsi, ReconstructionAndFactorization) {
    for (int kappa = 0; kappa <= 7; ++kappa) {
        for (int twoj : {1, 3, 5}) {
            const SectorLabels lab{kappa, 0, {}, Rational(twoj, 2)};
            auto cs = make_sectors(dicke(5), lab);
            const Sector& s = cs.front().sector;
            if (s.dim < 2) continue;
            auto phi = phi_from_psi(cs.front().psi, s);
            const double J = s.spin();
            for (int k = 0; k <= 20; ++k) {
                const double x = -J + 2.0 * J * k / 20.0;
                const double lhs = phi(x) * (J - x) * (J + 1 + x);
                const double rhs = cs.front().psi(x + s.l0() + J + 1);
                EXPECT_NEAR(lhs, rhs, 1e-9 * std::max(1.0, std::abs(rhs)));
            }
            for (int f = 0; f + 1 < s.dim; ++f) {
                const double direct = cs.front().psi(s.l0() + 1 + f);
                EXPECT_NEAR(psi_from_phi(phi, J, true, f), direct, 1e-9 * std::max(1.0, std::abs(direct)));
            }
        }
    }
}

TEST(GaugeNormalize, PolarDecomposition) {
    auto a = gauge_normalize(1.0, {0.0, 0.0});
    EXPECT_EQ(a.g_mod, 0.0);
    EXPECT_EQ(a.g_phase, 0.0);
    auto b = gauge_normalize(0.5, {0.0, 3.0});
    EXPECT_DOUBLE_EQ(b.g_mod, 3.0);
    EXPECT_NEAR(b.g_phase, std::numbers::pi / 2, 1e-15);
    auto c = gauge_normalize(2.0, {-1.0, 0.0});
    EXPECT_DOUBLE_EQ(c.g_mod, 1.0);
    EXPECT_NEAR(c.g_phase, std::numbers::pi, 1e-15);
}

TEST(StructurePolynomial, RejectsConstant) {
    EXPECT_THROW(StructurePolynomial(Polynomial({1.0})), Error);
}

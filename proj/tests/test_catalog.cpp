#include "sl2pd/catalog.hpp"

#include <gtest/gtest.h>

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

ModelSpec two_mode(int m, int n, Scalar w1 = Scalar(1), Scalar w2 = Scalar(1)) {
    ModelSpec s;
    s.family = Family::TwoMode;
    s.m = m;
    s.n = n;
    s.omegas = {w1, w2};
    s.g_prime = {0.2, 0.1};
    return s;
}

ModelSpec multimode(int m, int n) {
    ModelSpec s;
    s.family = Family::Multimode;
    s.m = m;
    s.n = n;
    for (int i = 0; i < m; ++i) s.omegas.push_back(Scalar(i + 1));
    s.omega0 = Scalar(m * (m + 1) / 2);
    s.g_prime = {0.25, 0.0};
    return s;
}

void expect_same(const Polynomial& a, const Polynomial& b, double rel) {
    const double scale = std::max({a.max_abs_coeff(), b.max_abs_coeff(), 1.0});
    const std::size_t n = std::max(a.size(), b.size());
    for (std::size_t k = 0; k < n; ++k) EXPECT_NEAR(a[k], b[k], rel * scale) << "coefficient " << k;
}

} // namespace

TEST(BuildPsi, Degrees) {
    EXPECT_EQ(build_psi(two_mode(3, 2), {1, 4, {}, 0}).degree(), 5);
    EXPECT_EQ(build_psi(multimode(3, 1), {0, 2, {0, 1, 2}, 0}).degree(), 4);
    EXPECT_EQ(build_psi(dicke(4, 2), {3, 0, {}, Rational(1)}).degree(), 4);
}

TEST(BuildPsi, OneDimensionalTwoModeSector) {
    auto psi = build_psi(two_mode(2, 1), {0, 0, {}, 0});
    const double l0 = 0.0;
    EXPECT_NEAR(psi(l0), 0.0, 1e-12);
    EXPECT_NEAR(psi(l0 + 1), 0.0, 1e-12);
}

TEST(BuildPsi, MultimodeProductForm) {
    // Psi = prod_i (x - l0 + kappa_i) (l_m - n x + n)^(n)
    const ModelSpec mm = multimode(3, 2);
    const SectorLabels lab{0, 5, {2, 0, 1}, 0};
    auto psi = build_psi(mm, lab);
    const double l0 = to_double(lowest_weight(mm, lab));
    const double lm = to_double(integrals(mm, lab).at("l3"));
    for (double x : {-1.3, 0.0, 0.4, 2.2}) {
        double ref = (x - l0 + 2) * (x - l0) * (x - l0 + 1);
        ref *= (lm - 2 * x + 2) * (lm - 2 * x + 1);
        EXPECT_NEAR(psi(x), ref, 1e-10 * std::max(1.0, std::abs(ref)));
    }
}

TEST(BuildPsi, LabelMismatch) {
    try {
        (void)build_psi(multimode(2, 1), {0, 1, {1, 2}, 0});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::LabelMismatch);
    }
    EXPECT_THROW((void)build_psi(dicke(2), {1, 0, {}, Rational(1, 2)}), Error);
    EXPECT_THROW((void)build_psi(two_mode(2, 1), {2, 0, {}, 0}), Error);
}

TEST(ReduceCoefficients, ResonancesAreExact) {
    auto r = reduce_coefficients(two_mode(2, 1, Scalar(1), Scalar(2)), {1, 3, {}, 0});
    ASSERT_TRUE(r.a_exact.has_value());
    EXPECT_EQ(*r.a_exact, Rational(0));
    EXPECT_DOUBLE_EQ(r.a, 0.0);
    EXPECT_NEAR(r.c_shift, 1.0 + 2 * 3, 1e-14);  // w1 (kappa + 2 s)

    ModelSpec d = dicke(3);
    d.omegas = {Scalar(Rational(3, 2))};
    d.epsilon = Scalar(Rational(3, 2));
    auto rd = reduce_coefficients(d, {4, 0, {}, Rational(3, 2)});
    EXPECT_EQ(*rd.a_exact, Rational(0));
    EXPECT_NEAR(rd.c_shift, 1.5 * (4 - 1.5), 1e-14);

    auto r11 = reduce_coefficients(two_mode(1, 1, Scalar(2), Scalar(2)), {0, 4, {}, 0});
    EXPECT_EQ(*r11.a_exact, Rational(0));
    EXPECT_NEAR(r11.c_shift, 2 * 2.0 * 2.0, 1e-14);  // 2 w l1, l1 = s/2
}

TEST(ReduceCoefficients, FloatFrequenciesStayInexact) {
    auto r = reduce_coefficients(two_mode(1, 1, Scalar(0.7), Scalar(0.3)), {0, 2, {}, 0});
    EXPECT_FALSE(r.a_exact.has_value());
    EXPECT_NEAR(r.a, 0.4, 1e-15);
}

TEST(ReduceCoefficients, MultimodeMatchesNumberOperators) {
    // H0 = sum w_i n_i + w0 n0 with n_i = V0 + c_i, n0 = l_m - n V0 on the lowest vector
    const ModelSpec mm = multimode(3, 1);
    const SectorLabels lab{0, 4, {1, 0, 2}, 0};
    auto rc = reduce_coefficients(mm, lab);
    // lowest vector: n_i = kappa_i, n0 = s
    const double h0 = 1 * 1 + 2 * 0 + 3 * 2 + 6 * 4;
    const double l0 = to_double(lowest_weight(mm, lab));
    EXPECT_NEAR(rc.a * l0 + rc.c_shift, h0, 1e-12);
}

TEST(EnumerateSectors, DimensionLaw) {
    LabelBounds b;
    b.kappa_min = 0;
    b.kappa_max = 1;
    b.s_min = 0;
    b.s_max = 6;
    for (const auto& cs : enumerate_sectors(two_mode(2, 1), b)) {
        EXPECT_EQ(cs.sector.dim, cs.labels.s + 1);
        EXPECT_EQ(cs.sector.J * Rational(2), Rational(cs.labels.s));
    }
    LabelBounds db;
    db.kappa_max = 9;
    db.j_min = Rational(1, 2);
    db.j_max = Rational(7, 2);
    int count = 0;
    for (const auto& cs : enumerate_sectors(dicke(7), db)) {
        const int twoj = static_cast<int>((cs.labels.j * Rational(2)).numerator());
        EXPECT_EQ(cs.sector.dim, std::min(twoj, cs.labels.kappa) + 1);
        EXPECT_EQ(cs.sector.J, std::min(cs.labels.j, Rational(cs.labels.kappa, 2)));
        validate_sector(cs.psi, cs.sector);
        ++count;
    }
    EXPECT_EQ(count, 10 * 4);
}

TEST(EnumerateSectors, DickeExamples) {
    auto cs = make_sectors(dicke(1), {1, 0, {}, Rational(1, 2)});
    ASSERT_EQ(cs.size(), 1u);
    EXPECT_EQ(cs[0].sector.lowest_weight, Rational(-1, 2));
    EXPECT_EQ(cs[0].sector.J, Rational(1, 2));
    EXPECT_EQ(cs[0].sector.dim, 2);
    EXPECT_EQ(cs[0].sector.multiplicity, 1);
    // N = 4, j = 1 appears 3 times
    EXPECT_EQ(dicke_multiplicity(4, Rational(1)), 3);
    EXPECT_EQ(dicke_multiplicity(4, Rational(0)), 2);
}

TEST(EnumerateSectors, TwoModeLinearExample) {
    auto cs = make_sectors(two_mode(1, 1), {0, 2, {}, 0});
    EXPECT_EQ(cs[0].sector.lowest_weight, Rational(-1));
    EXPECT_EQ(cs[0].sector.labels.at("l1"), Rational(1));
    EXPECT_EQ(cs[0].sector.J, Rational(1));
    EXPECT_EQ(cs[0].sector.dim, 3);
}

TEST(EnumerateSectors, DickeMultiphotonDimension) {
    // n = 2: ladder ends at min(2j, floor(kappa/2))
    for (int kappa = 0; kappa <= 9; ++kappa) {
        auto cs = make_sectors(dicke(6, 2), {kappa, 0, {}, Rational(3)});
        EXPECT_EQ(cs[0].sector.dim, std::min(6, kappa / 2) + 1);
        validate_sector(cs[0].psi, cs[0].sector);
        const double top = cs[0].sector.l0() + cs[0].sector.dim;
        EXPECT_NEAR(cs[0].psi(top), 0.0, 1e-9);
    }
}

TEST(EnumerateSectors, RoundTripLabels) {
    LabelBounds b;
    b.kappa_max = 2;
    b.s_max = 5;
    for (const auto& cs : enumerate_sectors(multimode(3, 2), b)) {
        const auto& l = cs.sector.labels;
        EXPECT_EQ(lowest_weight(multimode(3, 2), cs.labels), cs.sector.lowest_weight);
        // kappa_1 - kappa_2 = (m+n) l_1
        EXPECT_EQ(l.at("kappa1") - l.at("kappa2"), Rational(5) * l.at("l1"));
        EXPECT_NEAR(cs.psi(cs.sector.l0()), 0.0, 1e-9);
    }
}

TEST(Noncompact, SpinCandidates) {
    auto m2k0 = make_sectors(two_mode(2, 0), {0, 3, {}, 0}, 32);
    ASSERT_EQ(m2k0.size(), 1u);
    EXPECT_FALSE(m2k0[0].sector.compact);
    EXPECT_EQ(m2k0[0].sector.J, Rational(1, 4));
    EXPECT_EQ(m2k0[0].sector.dim, 32);
    auto phi = phi_from_psi(m2k0[0].psi, m2k0[0].sector);
    EXPECT_EQ(phi.degree(), 0);
    EXPECT_NEAR(phi.coeffs()[0], 4.0, 1e-12);

    auto m2k1 = make_sectors(two_mode(2, 0), {1, 3, {}, 0});
    EXPECT_EQ(m2k1[0].sector.J, Rational(3, 4));

    auto m3 = make_sectors(two_mode(3, 0), {0, 2, {}, 0});
    ASSERT_EQ(m3.size(), 2u);
    EXPECT_EQ(m3[0].sector.J, Rational(1, 6));
    EXPECT_EQ(m3[0].sector.j_branch, JBranch::Minus);
    EXPECT_EQ(m3[1].sector.J, Rational(1, 3));
    EXPECT_EQ(m3[1].sector.j_branch, JBranch::Plus);

    auto m1 = make_sectors(two_mode(1, 0), {0, 2, {}, 0});
    ASSERT_EQ(m1.size(), 1u);
    EXPECT_EQ(m1[0].sector.J, Rational(0));
}

TEST(PhiCatalog, Examples) {
    auto d = build_phi_catalog(dicke(1), {1, 0, {}, Rational(1, 2)});
    expect_same(d.poly(), Polynomial({0.5, -1.0}), 1e-14);
    auto d4 = build_phi_catalog(dicke(2), {4, 0, {}, Rational(1)});
    expect_same(d4.poly(), Polynomial({3.0, -1.0}), 1e-14);
    auto mm = build_phi_catalog(multimode(2, 1), {0, 4, {2, 0}, 0});
    expect_same(mm.poly(), Polynomial({5.0, 1.0}), 1e-14);
}

TEST(PhiCatalog, AgreesWithDivision) {
    for (int s = 0; s <= 20; ++s) {
        for (int kappa = 0; kappa < 3; ++kappa) {
            const SectorLabels lab{kappa, s, {}, 0};
            auto cs = make_sectors(two_mode(3, 1), lab);
            if (cs[0].sector.dim < 2) continue;
            expect_same(build_phi_catalog(two_mode(3, 1), lab).poly(),
                        phi_from_psi(cs[0].psi, cs[0].sector).poly(), 1e-10);
        }
    }
    for (int kappa = 0; kappa <= 4; ++kappa) {
        auto cs = make_sectors(two_mode(3, 0), {kappa % 3, kappa, {}, 0});
        for (const auto& c : cs)
            expect_same(build_phi_catalog(two_mode(3, 0), c.labels, c.sector.J).poly(),
                        phi_from_psi(c.psi, c.sector).poly(), 1e-10);
    }
}

TEST(PhiCatalog, Unsupported) {
    try {
        (void)build_phi_catalog(two_mode(2, 2), {0, 4, {}, 0});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::UnsupportedClosedForm);
    }
}

TEST(Validation, NGreaterThanM) {
    try {
        (void)build_psi(two_mode(1, 2), {0, 1, {}, 0});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ValidationError);
    }
}

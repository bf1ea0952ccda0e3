#include "sl2pd/gcs.hpp"

#include <gtest/gtest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include <numbers>

using namespace sl2pd;

TEST(TrigKernels, Identity) {
    for (bool compact : {true, false}) {
        auto k = trig_kernels(0.0, compact);
        EXPECT_EQ(k.t, 0.0);
        EXPECT_EQ(k.c, 1.0);
        EXPECT_EQ(k.s, 0.0);
        EXPECT_EQ(k.c2, 1.0);
        EXPECT_EQ(k.s2, 0.0);
    }
}

TEST(TrigKernels, CircularQuarter) {
    auto k = trig_kernels(std::numbers::pi / 4, true);
    EXPECT_NEAR(k.t, 1.0, 1e-15);
    EXPECT_NEAR(k.c, std::sqrt(0.5), 1e-15);
    EXPECT_NEAR(k.s, std::sqrt(0.5), 1e-15);
    EXPECT_NEAR(k.c2, 0.0, 1e-15);
    EXPECT_NEAR(k.s2, 1.0, 1e-15);
}

TEST(TrigKernels, Hyperbolic) {
    auto k = trig_kernels(1.0, false);
    EXPECT_DOUBLE_EQ(k.t, std::tanh(1.0));
    EXPECT_DOUBLE_EQ(k.c, std::cosh(1.0));
    EXPECT_DOUBLE_EQ(k.s, std::sinh(1.0));
    EXPECT_DOUBLE_EQ(k.c2, std::cosh(2.0));
    EXPECT_DOUBLE_EQ(k.s2, std::sinh(2.0));
}

TEST(Displacement, SpinHalfRotation) {
    for (double r : {0.1, 0.7, 1.2, -0.4}) {
        auto S = displacement_matrix(Rational(1, 2), {r, 0.0, true}, 2).entries;
        EXPECT_NEAR(S(0, 0), std::cos(r), 1e-15);
        EXPECT_NEAR(S(1, 1), std::cos(r), 1e-15);
        EXPECT_NEAR(S(0, 1), std::sin(r), 1e-15);
        EXPECT_NEAR(S(1, 0), -std::sin(r), 1e-15);
    }
}

TEST(Displacement, ZeroIsIdentity) {
    for (int twoj = 1; twoj <= 12; ++twoj) {
        auto S = displacement_matrix(Rational(twoj, 2), {0.0, 0.0, true}, twoj + 1).entries;
        EXPECT_EQ(S, Eigen::MatrixXd::Identity(twoj + 1, twoj + 1));
    }
    auto N = displacement_matrix(Rational(3, 4), {0.0, 0.0, false}, 10, 4).entries;
    EXPECT_EQ(N, Eigen::MatrixXd::Identity(10, 4));
}

TEST(Displacement, MatchesExpmCompact) {
    for (int twoj = 1; twoj <= 8; ++twoj) {
        const int d = twoj + 1;
        for (double r : {0.05, 0.4, 0.78, 1.1, 1.5}) {
            const Eigen::MatrixXd ex = (-r * ladder_generator(twoj / 2.0, d, true)).exp();
            const auto S = displacement_matrix(Rational(twoj, 2), {r, 0.0, true}, d).entries;
            EXPECT_LT((ex - S).cwiseAbs().maxCoeff(), 1e-10) << "2J=" << twoj << " r=" << r;
        }
    }
}

TEST(Displacement, MatchesExpmNoncompact) {
    const int cut = 200;
    for (auto J : {Rational(1, 4), Rational(1, 3), Rational(1), Rational(5, 2)}) {
        for (double r : {0.2, 0.6, 1.0}) {
            const Eigen::MatrixXd ex = (-r * ladder_generator(to_double(J), cut, false)).exp();
            const auto S = displacement_matrix(J, {r, 0.0, false}, cut, 5).entries;
            EXPECT_LT((ex.topLeftCorner(60, 5) - S.topRows(60)).cwiseAbs().maxCoeff(), 1e-10);
        }
    }
}

TEST(Displacement, UnitarityUpToSpinTwenty) {
    double worst = 0.0;
    for (int twoj = 1; twoj <= 40; ++twoj) {
        for (int i = 0; i < 50; ++i) {
            const double r = -1.55 + 3.1 * i / 49.0;
            const auto S = displacement_matrix(Rational(twoj, 2), {r, 0.0, true}, twoj + 1).entries;
            worst = std::max(worst, (S.transpose() * S - Eigen::MatrixXd::Identity(twoj + 1, twoj + 1)).cwiseAbs().maxCoeff());
        }
    }
    EXPECT_LT(worst, 1e-10);
}

TEST(Displacement, NoncompactCutoffTooSmall) {
    try {
        displacement_matrix(Rational(1, 2), {2.0, 0.0, false}, 10, 3);
        FAIL() << "expected CutoffTooSmall";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::CutoffTooSmall);
    }
}

TEST(Displacement, CompactCutoffMustMatch) {
    EXPECT_THROW(displacement_matrix(Rational(1), {0.3, 0.0, true}, 4), Error);
}

// gcs.hpp - SU(2)/SU(1,1) coherent-state kernels and displacement matrices.

#pragma once

#include "sl2pd/errors.hpp"
#include "sl2pd/rational.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <string>

namespace sl2pd {

struct GCSParameter {
    double r{0.0};
    double theta{0.0};
    bool compact{true};
};

struct TrigKernels {
    double t, c, s, c2, s2;
};

// Circular kernels for su(2), hyperbolic for su(1,1).
inline TrigKernels trig_kernels(double r, bool compact) noexcept {
    if (compact) return {std::tan(r), std::cos(r), std::sin(r), std::cos(2 * r), std::sin(2 * r)};
    return {std::tanh(r), std::cosh(r), std::sinh(r), std::cosh(2 * r), std::sinh(2 * r)};
}

struct DisplacementMatrix {
    Eigen::MatrixXd entries;  // rows f (ladder basis), columns v (displaced states)
    Rational J{0};
    double r{0.0};
    bool compact{true};
};

namespace detail {

// One entry S_fv as prefactor * 2F1 by forward term recurrence. The displacement is
// exp(-r (Y+ - Y-)), so the lowest displaced state has alternating amplitudes.
inline double displacement_entry(double J, int f, int v, double r, bool compact) {
    using ld = long double;
    const ld s = compact ? std::sin(static_cast<ld>(r)) : std::sinh(static_cast<ld>(r));
    const ld c = compact ? std::cos(static_cast<ld>(r)) : std::cosh(static_cast<ld>(r));
    const int k0 = std::max(0, v - f);
    const int p0 = f - v + 2 * k0;  // power of s in the first term
    if (s == 0.0L) return f == v ? 1.0 : 0.0;
    const ld twoJ = 2.0L * static_cast<ld>(J);
    // log of |prefactor * first term|
    ld lg;
    if (compact) {
        lg = 0.5L * (std::lgamma(static_cast<ld>(v + 1)) + std::lgamma(static_cast<ld>(f + 1)) -
                     std::lgamma(twoJ - v + 1) - std::lgamma(twoJ - f + 1)) +
             (twoJ - v - f) * std::log(c) + std::lgamma(twoJ - v + k0 + 1) - std::lgamma(static_cast<ld>(k0 + 1)) -
             std::lgamma(static_cast<ld>(f - v + k0 + 1)) - std::lgamma(static_cast<ld>(v - k0 + 1));
    } else {
        lg = 0.5L * (std::lgamma(static_cast<ld>(v + 1)) + std::lgamma(static_cast<ld>(f + 1)) +
                     std::lgamma(twoJ + v) + std::lgamma(twoJ + f)) -
             (twoJ + v + f) * std::log(c) - std::lgamma(static_cast<ld>(k0 + 1)) -
             std::lgamma(static_cast<ld>(f - v + k0 + 1)) - std::lgamma(static_cast<ld>(v - k0 + 1)) -
             std::lgamma(twoJ + v - k0);
    }
    lg += p0 * std::log(std::abs(s));
    // series relative to the first term; argument +s^2 (compact) or -s^2 (noncompact)
    // The series alternates; near r = pi/4 the cancellation at J ~ 20 exceeds what
    // long double can absorb, so accumulate in quad precision.
    using qd = __float128;
    const qd z = compact ? static_cast<qd>(s) * static_cast<qd>(s) : -static_cast<qd>(s) * static_cast<qd>(s);
    const qd tj = static_cast<qd>(twoJ);
    qd term = 1;
    qd sum = 1;
    for (int k = k0; k < v; ++k) {
        const qd b = compact ? tj - v + 1 + k : -static_cast<qd>(v) - tj + 1 + k;
        term *= z * static_cast<qd>(k - v) * b / (static_cast<qd>(k + 1) * static_cast<qd>(f - v + 1 + k));
        sum += term;
    }
    ld sign = (k0 % 2 == 0) ? 1.0L : -1.0L;  // (-v)_k0 sign carried by the first term
    if ((f - v) % 2 != 0) sign = -sign;     // r -> -r
    if (s < 0 && p0 % 2 != 0) sign = -sign;
    return static_cast<double>(sign * std::exp(lg) * static_cast<ld>(sum));
}

} // namespace detail

// S_fv(J; r) in gauge theta = 0. Compact: cutoff must be 2J+1. Noncompact: rows
// 0..cutoff-1, columns 0..count-1.
inline DisplacementMatrix displacement_matrix(const Rational& J, const GCSParameter& p, int cutoff, int count = 0) {
    const double j = to_double(J);
    DisplacementMatrix out;
    out.J = J;
    out.r = p.r;
    out.compact = p.compact;
    if (p.compact) {
        const int dim = static_cast<int>((J * Rational(2)).numerator()) + 1;
        if (cutoff != dim) fail(ErrorKind::DimensionMismatch, "compact displacement needs cutoff = 2J+1");
        out.entries.resize(dim, dim);
        // Beyond pi/4 the series cancels badly; use S(r) = S(pi/2) S(pi/2 - r)^T with
        // S(pi/2)_{2J-v, v} = (-1)^(2J-v).
        const double rr = std::abs(p.r);
        const bool reflect = rr > std::numbers::pi / 4;
        const double re = reflect ? std::numbers::pi / 2 - rr : rr;
        for (int f = 0; f < dim; ++f)
            for (int v = 0; v < dim; ++v)
                out.entries(f, v) = reflect ? ((f % 2) ? -1.0 : 1.0) * detail::displacement_entry(j, v, dim - 1 - f, re, true)
                                            : detail::displacement_entry(j, f, v, re, true);
        if (p.r < 0) out.entries.transposeInPlace();
        return out;
    }
    if (j <= 0.0) fail(ErrorKind::InvalidArgument, "noncompact displacement needs J > 0");
    const int cols = count > 0 ? count : cutoff;
    if (cols > cutoff) fail(ErrorKind::DimensionMismatch, "more columns than the cutoff");
    out.entries.resize(cutoff, cols);
    for (int f = 0; f < cutoff; ++f)
        for (int v = 0; v < cols; ++v) out.entries(f, v) = detail::displacement_entry(j, f, v, p.r, false);
    for (int v = 0; v < cols; ++v) {
        const double nrm = out.entries.col(v).squaredNorm();
        if (std::abs(nrm - 1.0) > 1e-8)
            fail(ErrorKind::CutoffTooSmall, "column " + std::to_string(v) + " norm " + std::to_string(nrm));
    }
    return out;
}

// Dense spin generator Y+ - Y- in the ladder basis, for oracle comparisons.
inline Eigen::MatrixXd ladder_generator(double J, int dim, bool compact) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(dim, dim);
    for (int f = 0; f + 1 < dim; ++f) {
        const double e = compact ? std::sqrt((f + 1.0) * (2.0 * J - f)) : std::sqrt((f + 1.0) * (2.0 * J + f));
        g(f + 1, f) = e;
        g(f, f + 1) = -e;
    }
    return g;
}

} // namespace sl2pd

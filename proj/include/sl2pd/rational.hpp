// rational.hpp - Exact half-integer label arithmetic and exact-or-float scalars.

#pragma once

#include <boost/rational.hpp>

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

namespace sl2pd {

using Rational = boost::rational<std::int64_t>;

inline double to_double(const Rational& q) noexcept {
    return static_cast<double>(q.numerator()) / static_cast<double>(q.denominator());
}

inline std::string to_string(const Rational& q) {
    if (q.denominator() == 1) return std::to_string(q.numerator());
    return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

inline bool is_integer(const Rational& q) noexcept { return q.denominator() == 1; }

inline bool is_half_integer(const Rational& q) noexcept {
    return q.denominator() == 1 || q.denominator() == 2;
}

// Largest integer not exceeding q.
inline std::int64_t floor_int(const Rational& q) noexcept {
    auto n = q.numerator();
    auto d = q.denominator();
    auto f = n / d;
    if ((n % d != 0) && (n < 0)) --f;
    return f;
}

// A model parameter that may be known exactly. Resonance conditions are decided on
// the exact path when every input has one.
struct Scalar {
    double value{0.0};
    std::optional<Rational> exact{};

    Scalar() = default;
    Scalar(double v) : value(v) {}                       // NOLINT(google-explicit-constructor)
    Scalar(int v) : value(v), exact(Rational(v)) {}      // NOLINT(google-explicit-constructor)
    Scalar(const Rational& q) : value(to_double(q)), exact(q) {} // NOLINT(google-explicit-constructor)
};

inline Scalar operator*(std::int64_t k, const Scalar& x) {
    Scalar out;
    out.value = static_cast<double>(k) * x.value;
    if (x.exact) out.exact = Rational(k) * *x.exact;
    return out;
}

inline Scalar operator*(const Rational& k, const Scalar& x) {
    Scalar out;
    out.value = to_double(k) * x.value;
    if (x.exact) out.exact = k * *x.exact;
    return out;
}

inline Scalar operator+(const Scalar& x, const Scalar& y) {
    Scalar out;
    out.value = x.value + y.value;
    if (x.exact && y.exact) {
        out.exact = *x.exact + *y.exact;
        out.value = to_double(*out.exact);
    }
    return out;
}

inline Scalar operator-(const Scalar& x, const Scalar& y) {
    Scalar out;
    out.value = x.value - y.value;
    if (x.exact && y.exact) {
        out.exact = *x.exact - *y.exact;
        out.value = to_double(*out.exact);
    }
    return out;
}

} // namespace sl2pd

// polynomial.hpp - Dense real polynomials in ascending-power storage.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <utility>
#include <vector>

namespace sl2pd {

class Polynomial {
public:
    Polynomial() : c_{0.0} {}
    explicit Polynomial(std::vector<double> coeffs) : c_(std::move(coeffs)) {
        if (c_.empty()) c_.push_back(0.0);
    }
    Polynomial(std::initializer_list<double> coeffs) : Polynomial(std::vector<double>(coeffs)) {}

    static Polynomial constant(double v) { return Polynomial({v}); }
    // (x - root)
    static Polynomial linear_root(double root) { return Polynomial({-root, 1.0}); }

    const std::vector<double>& coeffs() const noexcept { return c_; }
    std::size_t size() const noexcept { return c_.size(); }
    double operator[](std::size_t k) const noexcept { return k < c_.size() ? c_[k] : 0.0; }

    // Nominal degree (length - 1); may include trailing zeros until trimmed.
    int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }

    double leading() const noexcept { return c_.back(); }

    double max_abs_coeff() const noexcept {
        double m = 0.0;
        for (double v : c_) m = std::max(m, std::abs(v));
        return m;
    }

    double operator()(double x) const noexcept {
        double acc = 0.0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
        return acc;
    }

    Polynomial derivative() const {
        if (c_.size() <= 1) return Polynomial({0.0});
        std::vector<double> d(c_.size() - 1);
        for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = static_cast<double>(k) * c_[k];
        return Polynomial(std::move(d));
    }

    // Drop trailing coefficients with |c| <= tol.
    Polynomial trimmed(double tol = 0.0) const {
        std::vector<double> d = c_;
        while (d.size() > 1 && std::abs(d.back()) <= tol) d.pop_back();
        return Polynomial(std::move(d));
    }

    // p(x + shift), by repeated synthetic division (Taylor shift).
    Polynomial shifted(double shift) const {
        std::vector<double> d = c_;
        const std::size_t n = d.size();
        for (std::size_t i = 0; i + 1 < n; ++i)
            for (std::size_t k = n - 1; k-- > i;) d[k] += shift * d[k + 1];
        return Polynomial(std::move(d));
    }

    friend Polynomial operator*(const Polynomial& p, const Polynomial& q) {
        std::vector<double> d(p.c_.size() + q.c_.size() - 1, 0.0);
        for (std::size_t i = 0; i < p.c_.size(); ++i)
            for (std::size_t j = 0; j < q.c_.size(); ++j) d[i + j] += p.c_[i] * q.c_[j];
        return Polynomial(std::move(d));
    }

    friend Polynomial operator*(double s, const Polynomial& p) {
        std::vector<double> d = p.c_;
        for (double& v : d) v *= s;
        return Polynomial(std::move(d));
    }

    friend Polynomial operator+(const Polynomial& p, const Polynomial& q) {
        std::vector<double> d(std::max(p.c_.size(), q.c_.size()), 0.0);
        for (std::size_t i = 0; i < d.size(); ++i) d[i] = p[i] + q[i];
        return Polynomial(std::move(d));
    }

    friend Polynomial operator-(const Polynomial& p, const Polynomial& q) {
        return p + (-1.0) * q;
    }

private:
    std::vector<double> c_;
};

struct DivisionResult {
    Polynomial quotient;
    Polynomial remainder;
};

// Long division num = quotient * den + remainder, deg(remainder) < deg(den).
inline DivisionResult divide(const Polynomial& num, const Polynomial& den) {
    const Polynomial d = den.trimmed();
    const int dn = d.degree();
    std::vector<double> r = num.coeffs();
    const int nn = static_cast<int>(r.size()) - 1;
    if (nn < dn) return {Polynomial({0.0}), num};
    std::vector<double> q(static_cast<std::size_t>(nn - dn + 1), 0.0);
    const double lead = d.leading();
    for (int k = nn - dn; k >= 0; --k) {
        const double coef = r[static_cast<std::size_t>(k + dn)] / lead;
        q[static_cast<std::size_t>(k)] = coef;
        for (int j = 0; j <= dn; ++j) r[static_cast<std::size_t>(k + j)] -= coef * d[static_cast<std::size_t>(j)];
    }
    r.resize(static_cast<std::size_t>(std::max(dn, 1)));
    return {Polynomial(std::move(q)), Polynomial(std::move(r))};
}

// Falling factorial X(X-1)...(X-k+1) where X = scale*x + offset.
inline Polynomial falling_power(double scale, double offset, int k) {
    Polynomial p({1.0});
    for (int i = 0; i < k; ++i) p = p * Polynomial({offset - static_cast<double>(i), scale});
    return p;
}

} // namespace sl2pd

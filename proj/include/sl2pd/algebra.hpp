// algebra.hpp - Structure polynomials, sl_pd(2) sectors, and the Holstein-Primakoff
// reduction Psi -> Phi that turns a polynomial deformation into an ordinary sl(2)
// Hamiltonian with an intensity-dependent coupling.

#pragma once

#include "sl2pd/errors.hpp"
#include "sl2pd/polynomial.hpp"
#include "sl2pd/rational.hpp"

#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <string>
#include <vector>

namespace sl2pd {

struct Tolerances {
    double zero_abs{1e-10};     // zero tests on polynomial values
    double identity_rel{1e-9};  // identity checks
};

// Psi(V0) with [V-, V+] = Psi(V0+1) - Psi(V0). Squared ladder norms on physical states.
class StructurePolynomial {
public:
    StructurePolynomial() : p_({0.0, 1.0}) {}
    explicit StructurePolynomial(Polynomial p) : p_(std::move(p)) {
        p_ = p_.trimmed();
        if (p_.degree() < 1)
            fail(ErrorKind::InvalidArgument, "structure polynomial must have degree >= 1");
        for (double c : p_.coeffs())
            if (!std::isfinite(c)) fail(ErrorKind::InvalidArgument, "non-finite structure coefficient");
    }

    const Polynomial& poly() const noexcept { return p_; }
    const std::vector<double>& coeffs() const noexcept { return p_.coeffs(); }
    int degree() const noexcept { return p_.degree(); }
    double operator()(double x) const noexcept { return p_(x); }

private:
    Polynomial p_;
};

// Phi(Y0), degree n(Psi) - 2.
class PhiPolynomial {
public:
    PhiPolynomial() : p_({1.0}) {}
    explicit PhiPolynomial(Polynomial p) : p_(std::move(p)) {}

    const Polynomial& poly() const noexcept { return p_; }
    const std::vector<double>& coeffs() const noexcept { return p_.coeffs(); }
    int degree() const noexcept { return p_.degree(); }
    double operator()(double x) const noexcept { return p_(x); }
    double derivative(double x) const { return p_.derivative()(x); }

private:
    Polynomial p_;
};

// Which admissible effective spin a noncompact sector was built with. Noncompact
// sectors may admit two J values that both make Phi polynomial.
enum class JBranch { Unique, Minus, Plus };

// One irreducible subspace L([l_i]).
struct Sector {
    std::string id;                          // human-readable label tuple
    std::map<std::string, Rational> labels;  // l_i and raw model labels
    Rational lowest_weight{0};               // l_0
    Rational J{0};                           // effective spin
    bool compact{true};
    int dim{1};                              // 2J+1 when compact; truncation otherwise
    double a{0.0};                           // V0 coefficient
    double g_mod{0.0};
    double g_phase{0.0};
    double c_shift{0.0};                     // C([l_i])
    long multiplicity{1};                    // degenerate copies (Dicke S_N labels)
    JBranch j_branch{JBranch::Unique};

    double l0() const noexcept { return to_double(lowest_weight); }
    double spin() const noexcept { return to_double(J); }
    // C' = C + a(l0 +- J): the constant after the shift V0 -> Y0.
    double c_prime() const noexcept { return c_shift + a * (l0() + (compact ? spin() : -spin())); }
    // Lowest Y0 eigenvalue, -+J.
    double y0_lowest() const noexcept { return compact ? -spin() : spin(); }
};

inline double eval_psi(const StructurePolynomial& psi, double x) noexcept { return psi(x); }

// Orthonormal-basis matrix element of V+ between levels v and v+1.
inline double ladder_norm(const StructurePolynomial& psi, const Rational& l0, int v,
                          const Tolerances& tol = {}) {
    if (v < 0) fail(ErrorKind::InvalidArgument, "ladder level must be nonnegative");
    const double x = to_double(l0) + static_cast<double>(v) + 1.0;
    const double val = psi(x);
    if (val < -tol.zero_abs)
        fail(ErrorKind::NegativeLadderNorm,
             "Psi(" + std::to_string(x) + ") = " + std::to_string(val) + " < 0");
    return std::sqrt(std::max(val, 0.0));
}

// Checks the lowest-weight and ladder-reality invariants of a sector against Psi.
inline void validate_sector(const StructurePolynomial& psi, const Sector& s, const Tolerances& tol = {}) {
    if (s.dim < 1) fail(ErrorKind::InvalidArgument, "sector dimension must be >= 1");
    if (s.compact) {
        const Rational twoJ = s.J * Rational(2);
        if (!is_integer(twoJ) || twoJ.numerator() + 1 != s.dim)
            fail(ErrorKind::InvalidArgument, "compact sector must have dim = 2J+1");
    }
    if (std::abs(psi(s.l0())) > tol.zero_abs)
        fail(ErrorKind::InvalidArgument, "lowest weight is not a root of Psi in sector " + s.id);
    for (int v = 0; v + 1 < s.dim; ++v) (void)ladder_norm(psi, s.lowest_weight, v, tol);
}

// Phi(Y0) = Psi(Y0 + l0 +- J + 1) / [(J -+ Y0)(+-J + 1 + Y0)], exact polynomial quotient.
inline PhiPolynomial phi_from_psi(const StructurePolynomial& psi, const Rational& l0, const Rational& J,
                                  bool compact) {
    if (psi.degree() < 2)
        fail(ErrorKind::InvalidArgument, "Phi requires a structure polynomial of degree >= 2");
    const Rational shift = compact ? l0 + J + Rational(1) : l0 - J + Rational(1);
    const Polynomial shifted = psi.poly().shifted(to_double(shift));
    const double j = to_double(J);
    // compact: (J - Y)(J + 1 + Y) = -(Y - J)(Y + J + 1); noncompact: (Y + J)(Y - J + 1)
    const Polynomial den = compact ? (-1.0) * (Polynomial::linear_root(j) * Polynomial::linear_root(-j - 1.0))
                                   : Polynomial::linear_root(-j) * Polynomial::linear_root(j - 1.0);
    auto [q, r] = divide(shifted, den);
    const double scale = psi.poly().max_abs_coeff();
    for (double c : r.coeffs())
        if (std::abs(c) > 1e-10 * scale)
            fail(ErrorKind::NonzeroRemainder, "Psi is not divisible for l0=" + to_string(l0) +
                                                  ", J=" + to_string(J));
    return PhiPolynomial(q);
}

inline PhiPolynomial phi_from_psi(const StructurePolynomial& psi, const Sector& s) {
    return phi_from_psi(psi, s.lowest_weight, s.J, s.compact);
}

struct GaugedCoupling {
    double a;
    double g_mod;
    double g_phase;
};

// g = |g| e^{i theta}; spectra depend on |g| only.
inline GaugedCoupling gauge_normalize(double a, std::complex<double> g) noexcept {
    const double mod = std::abs(g);
    return {a, mod, mod == 0.0 ? 0.0 : std::arg(g)};
}

// Psi(l0 + 1 + f) recovered from Phi via Psi(l0+1+f) = Phi(-+J+f)(2J -+ f)(f+1).
inline double psi_from_phi(const PhiPolynomial& phi, double J, bool compact, int f) noexcept {
    const double fd = static_cast<double>(f);
    return compact ? phi(-J + fd) * (2.0 * J - fd) * (fd + 1.0)
                   : phi(J + fd) * (2.0 * J + fd) * (fd + 1.0);
}

} // namespace sl2pd

// variational.hpp - Cluster (cq) and cluster mean-field (cmf) variational spectra,
// their stationarity conditions, resonance closed forms and the trace error measures.

#pragma once

#include "sl2pd/algebra.hpp"
#include "sl2pd/catalog.hpp"
#include "sl2pd/errors.hpp"
#include "sl2pd/exact.hpp"
#include "sl2pd/gcs.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

namespace sl2pd {

enum class Method { Exact, Cq, Cmf, Linear, ClosedForm };
enum class RootPolicy { MinDelta2, MinGround };

inline std::string to_string(Method m) {
    switch (m) {
    case Method::Exact: return "exact";
    case Method::Cq: return "cq";
    case Method::Cmf: return "cmf";
    case Method::Linear: return "linear";
    case Method::ClosedForm: return "closed_form";
    }
    return "unknown";
}

inline std::string to_string(RootPolicy p) { return p == RootPolicy::MinDelta2 ? "min-delta2" : "min-ground"; }

struct VariationalSpectrum {
    Method method{Method::Cq};
    std::vector<double> energies;  // NaN where a level failed, see level_flags
    double r_used{0.0};
    std::vector<double> roots_found;
    std::string sector_ref;
    std::vector<std::string> level_flags;
};

struct ApproxErrorReport {
    double delta1{0.0};
    double delta2{0.0};
    Method method{Method::Cq};
};

namespace detail {

inline double phi_checked(const PhiPolynomial& phi, double y, double tol = 1e-10) {
    const double v = phi(y);
    if (v < -tol) fail(ErrorKind::NegativePhi, "Phi(" + std::to_string(y) + ") = " + std::to_string(v));
    return std::max(v, 0.0);
}

// log B_f, B_f = sqrt(Phi(-+J+f)) N^{-2}(J, f+1) / (f! (f+1)!); -inf when Phi vanishes.
inline double log_b(const Sector& s, const PhiPolynomial& phi, int f) {
    const double J = s.spin();
    const double ph = phi_checked(phi, s.compact ? -J + f : J + f);
    if (ph == 0.0) return -std::numeric_limits<double>::infinity();
    const double lf = std::lgamma(f + 1.0);
    if (s.compact) return 0.5 * std::log(ph) + std::lgamma(2 * J + 1) - lf - std::lgamma(2 * J - f);
    return 0.5 * std::log(ph) + std::lgamma(2 * J + f + 1) - lf - std::lgamma(2 * J);
}

// Lazily extended table of log B_f for one (sector, Phi).
class LogBTable {
public:
    LogBTable(const Sector& s, const PhiPolynomial& phi) : s_(s), phi_(phi) {}
    double operator()(int f) {
        while (static_cast<int>(lb_.size()) <= f) lb_.push_back(log_b(s_, phi_, static_cast<int>(lb_.size())));
        return lb_[static_cast<std::size_t>(f)];
    }

private:
    const Sector& s_;
    const PhiPolynomial& phi_;
    std::vector<double> lb_;
};

inline double pow_term(double logb, double sn, int ps, double cs, double pc) {
    if (!std::isfinite(logb)) return 0.0;
    if (ps > 0 && sn == 0.0) return 0.0;
    if (pc != 0.0 && cs == 0.0) return pc > 0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::exp(logb + (ps > 0 ? ps * std::log(sn) : 0.0) + (pc != 0.0 ? pc * std::log(cs) : 0.0));
}

// Sums over f with early exit after five consecutive negligible terms (noncompact).
template <class Term>
double truncated_sum(Term term, int max_terms = 1'000'000) {
    double sum = 0.0;
    int small = 0;
    for (int f = 0; f < max_terms; ++f) {
        const double t = term(f);
        sum += t;
        if (std::abs(t) <= 1e-16 * std::abs(sum)) {
            if (++small >= 5) return sum;
        } else {
            small = 0;
        }
    }
    fail(ErrorKind::NoConvergence, "coupling series did not converge");
}

// Bisection on a bracketing pair to machine resolution.
template <class F>
double bisect(F g, double lo, double hi, double glo) {
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi || hi - lo < 1e-15 * std::max(1.0, std::abs(mid))) break;
        const double gm = g(mid);
        if (gm == 0.0) return mid;
        if ((gm < 0) == (glo < 0)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Admissible r range mapped from a log-spaced grid in t = tan r / tanh r.
inline std::vector<double> r_grid(bool compact, int points = 2400) {
    std::vector<double> r;
    r.reserve(static_cast<std::size_t>(points));
    const double lo = std::log(1e-12);
    const double hi = compact ? std::log(1e12) : std::log(std::tanh(3.5));
    for (int i = 0; i < points; ++i) {
        const double t = std::exp(lo + (hi - lo) * i / (points - 1));
        r.push_back(compact ? std::atan(t) : std::atanh(t));
    }
    return r;
}

template <class F>
std::vector<double> bracket_roots(F g, bool compact, const std::vector<char>* valid = nullptr) {
    const auto grid = r_grid(compact);
    std::vector<double> vals(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        try {
            vals[i] = g(grid[i]);
        } catch (const Error&) {
            vals[i] = std::numeric_limits<double>::quiet_NaN();
        }
    }
    std::vector<double> roots;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        if (valid && (!(*valid)[i] || !(*valid)[i + 1])) continue;
        if (!std::isfinite(vals[i]) || !std::isfinite(vals[i + 1])) continue;
        if (vals[i] == 0.0) {
            roots.push_back(grid[i]);
            continue;
        }
        if ((vals[i] < 0) != (vals[i + 1] < 0) && vals[i + 1] != 0.0)
            roots.push_back(bisect(g, grid[i], grid[i + 1], vals[i]));
    }
    return roots;
}

} // namespace detail

// Displaced-state expectation <S e_v | H | S e_v>, with Psi values from the factorization
// Psi(l0+1+f) = Phi(-+J+f)(2J -+ f)(f+1).
inline double energy_cq(const Sector& sector, const PhiPolynomial& phi, const DisplacementMatrix& S, int v) {
    if (v < 0 || v >= S.entries.cols()) fail(ErrorKind::DimensionMismatch, "level outside the displacement matrix");
    if (S.compact != sector.compact || S.J != sector.J) fail(ErrorKind::DimensionMismatch, "displacement built for another sector");
    const double J = sector.spin();
    const auto k = trig_kernels(S.r, sector.compact);
    const double pm = sector.compact ? -J : J;
    double coupling = 0.0;
    for (Eigen::Index f = 0; f + 1 < S.entries.rows(); ++f) {
        const double psi = psi_from_phi(phi, J, sector.compact, static_cast<int>(f));
        if (psi < -1e-10) fail(ErrorKind::NegativePhi, "negative ladder value in cq sum");
        coupling += S.entries(f, v) * S.entries(f + 1, v) * std::sqrt(std::max(psi, 0.0));
    }
    return sector.c_prime() + sector.a * (v + pm) * k.c2 + 2.0 * sector.g_mod * coupling;
}

// Closed series for the lowest cq level:
// E(0) = C' -+ aJ c(2r) - 2|g| c^{+-4J} sum_f B_f t^{2f+1}.
inline double energy_cq_ground_series(const Sector& sector, const PhiPolynomial& phi, double r) {
    const double J = sector.spin();
    const auto k = trig_kernels(r, sector.compact);
    if (sector.dim < 2 || J == 0.0) return sector.c_prime() + sector.a * (sector.compact ? -J : J) * k.c2;
    double series;
    if (sector.compact) {
        series = 0.0;
        for (int f = 0; f < static_cast<int>(2 * J + 0.5); ++f)
            series += detail::pow_term(detail::log_b(sector, phi, f), std::abs(k.s), 2 * f + 1, std::abs(k.c), 4 * J - 2 * f - 1);
        if (k.s < 0) series = -series;
    } else {
        const double lc = -4 * J * std::log(k.c);
        detail::LogBTable lb(sector, phi);
        series = detail::truncated_sum([&](int f) { return detail::pow_term(lb(f) + lc, std::abs(k.t), 2 * f + 1, 1.0, 0.0); });
    }
    return sector.c_prime() + (sector.compact ? -1.0 : 1.0) * sector.a * J * k.c2 - 2.0 * sector.g_mod * series;
}

// dE(0)/dr of the lowest cq level (compact) or dE(0)/d tanh r (noncompact).
inline double cq_stationarity_residual(const Sector& sector, const PhiPolynomial& phi, double r) {
    const double J = sector.spin();
    const double a = sector.a;
    const double g = sector.g_mod;
    if (sector.compact) {
        const double s = std::sin(r), c = std::cos(r);
        double d = 0.0;
        for (int f = 0; f < static_cast<int>(2 * J + 0.5); ++f) {
            const double lb = detail::log_b(sector, phi, f);
            d += (2 * f + 1) * detail::pow_term(lb, s, 2 * f, c, 4 * J - 2 * f);
            d -= (4 * J - 2 * f - 1) * detail::pow_term(lb, s, 2 * f + 2, c, 4 * J - 2 * f - 2);
        }
        return 2 * a * J * std::sin(2 * r) - 2 * g * d;
    }
    const double al = std::tanh(r);
    const double w = 1 - al * al;
    detail::LogBTable lb(sector, phi);
    const double s0 = detail::truncated_sum([&](int f) { return detail::pow_term(lb(f), al, 2 * f + 1, 1.0, 0.0); });
    const double s1 = detail::truncated_sum([&](int f) { return (2 * f + 1) * detail::pow_term(lb(f), al, 2 * f, 1.0, 0.0); });
    return 4 * a * J * al / (w * w) - 2 * g * (std::pow(w, 2 * J) * s1 - 4 * J * al * std::pow(w, 2 * J - 1) * s0);
}

// All interior stationary points of the lowest cq level, as r values.
inline std::vector<double> solve_stationarity_cq(const Sector& sector, const PhiPolynomial& phi) {
    if (sector.g_mod <= 0.0) fail(ErrorKind::InvalidArgument, "stationarity needs |g| > 0");
    if (sector.dim < 2 || sector.spin() == 0.0) return {0.0};
    auto g = [&](double r) { return cq_stationarity_residual(sector, phi, r); };
    auto roots = detail::bracket_roots(g, sector.compact);
    if (roots.empty()) fail(ErrorKind::NoRealRoot, "no cq stationary point in sector " + sector.id);
    return roots;
}

// Mean-field level energy; throws NegativePhiArgument off the physical shell.
inline double energy_cmf(const Sector& sector, const PhiPolynomial& phi, double r, int v) {
    const double J = sector.spin();
    const auto k = trig_kernels(r, sector.compact);
    const double y = (sector.compact ? -J + v : J + v) * k.c2;
    const double ph = phi(y);
    if (ph < -1e-10)
        fail(ErrorKind::NegativePhiArgument, "Phi(" + std::to_string(y) + ") < 0 at level " + std::to_string(v));
    const double weight = sector.compact ? J - v : J + v;
    const double pm = sector.compact ? -J : J;
    return sector.c_prime() + sector.a * (v + pm) * k.c2 - 2.0 * sector.g_mod * weight * k.s2 * std::sqrt(std::max(ph, 0.0));
}

// G(r) = (a/|g|) s2 sqrt(Phi) - 2 c2 Phi - J s2^2 Phi', Phi at -+J c(2r).
inline double cmf_stationarity_residual(const Sector& sector, const PhiPolynomial& phi, double r) {
    const double J = sector.spin();
    const auto k = trig_kernels(r, sector.compact);
    const double y = (sector.compact ? -J : J) * k.c2;
    const double ph = phi(y);
    return sector.a / sector.g_mod * k.s2 * std::sqrt(std::max(ph, 0.0)) - 2 * k.c2 * ph -
           J * k.s2 * k.s2 * phi.derivative(y);
}

inline std::vector<double> solve_stationarity_cmf(const Sector& sector, const PhiPolynomial& phi) {
    if (sector.g_mod <= 0.0) fail(ErrorKind::InvalidArgument, "stationarity needs |g| > 0");
    if (sector.dim < 2 || sector.spin() == 0.0) return {0.0};
    const double J = sector.spin();
    auto g = [&](double r) { return cmf_stationarity_residual(sector, phi, r); };
    const auto grid = detail::r_grid(sector.compact);
    std::vector<char> valid(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto k = trig_kernels(grid[i], sector.compact);
        valid[i] = phi((sector.compact ? -J : J) * k.c2) > 1e-10;
    }
    auto roots = detail::bracket_roots(g, sector.compact, &valid);
    if (roots.empty()) fail(ErrorKind::NoRealRoot, "no cmf stationary point in sector " + sector.id);
    return roots;
}

struct ClosedFormResult {
    double cos2r{0.0};
    std::vector<double> energies;
};

// Resonance closed forms for the covered n = 1 cases.
inline ClosedFormResult closed_form_resonance(const ModelSpec& model, const SectorLabels& lab) {
    auto unsupported = [&](const std::string& why) -> ClosedFormResult {
        fail(ErrorKind::UnsupportedClosedForm, why + " for " + sector_id(model, lab));
    };
    if (model.n != 1) return unsupported("closed form needs n = 1");
    const ReducedCoefficients rc = reduce_coefficients(model, lab);
    const bool resonant = rc.a_exact ? *rc.a_exact == Rational(0) : rc.a == 0.0;
    if (!resonant) return unsupported("closed form needs exact resonance");
    auto cs = make_sectors(model, lab);
    const Sector& sec = cs.front().sector;
    const double J = sec.spin();
    if (sec.dim < 2) return unsupported("closed form needs J > 0");
    double c = 0.0;
    switch (model.family) {
    case Family::TwoMode: {
        if (model.m != 2) return unsupported("closed form needs m = 2");
        const double p = (2.0 * lab.kappa + 1.0) / lab.s;
        c = (1.0 + p - std::sqrt((1.0 + p) * (1.0 + p) + 3.0)) / 3.0;
        break;
    }
    case Family::Multimode: {
        if (model.m != 2) return unsupported("closed form needs m = 2");
        const int kap = *std::max_element(lab.kappas.begin(), lab.kappas.end());
        const double q = (lab.s + 2.0 * kap + 2.0) / lab.s;
        c = (q - std::sqrt(q * q + 3.0)) / 3.0;
        break;
    }
    case Family::Dicke: {
        const double twoj = 2.0 * to_double(lab.j);
        const double mu = std::max<double>(lab.kappa, twoj) / std::min<double>(lab.kappa, twoj);
        c = (1.0 - 2.0 * mu + 2.0 * std::sqrt(mu * mu - mu + 1.0)) / 3.0;
        break;
    }
    case Family::Custom: return unsupported("no closed form");
    }
    const PhiPolynomial phi = build_phi_catalog(model, lab);
    ClosedFormResult out;
    out.cos2r = c;
    const double sn = std::sqrt(1.0 - c * c);
    for (int v = 0; v < sec.dim; ++v) {
        const double ph = phi((-J + v) * c);
        out.energies.push_back(ph < -1e-10 ? std::numeric_limits<double>::quiet_NaN()
                                           : sec.c_shift - 2.0 * sec.g_mod * (J - v) * sn * std::sqrt(std::max(ph, 0.0)));
    }
    return out;
}

// S diag(E) S^T in the ladder basis; columns of S are the trial states.
inline Eigen::MatrixXd approx_hamiltonian(const std::vector<double>& energies, const DisplacementMatrix& S) {
    if (static_cast<Eigen::Index>(energies.size()) != S.entries.cols())
        fail(ErrorKind::DimensionMismatch, "spectrum and displacement sizes differ");
    Eigen::VectorXd e(static_cast<Eigen::Index>(energies.size()));
    for (std::size_t i = 0; i < energies.size(); ++i) e(static_cast<Eigen::Index>(i)) = energies[i];
    return S.entries * e.asDiagonal() * S.entries.transpose();
}

inline double delta_p(const Eigen::MatrixXd& h, const Eigen::MatrixXd& ha, int p) {
    if (h.rows() != ha.rows() || h.cols() != ha.cols()) fail(ErrorKind::DimensionMismatch, "matrix sizes differ");
    const Eigen::MatrixXd d = h - ha;
    double num, den;
    if (p == 1) {
        num = d.trace();
        den = h.trace();
    } else if (p == 2) {
        num = (d * d).trace();
        den = (h * h).trace();
    } else {
        fail(ErrorKind::InvalidArgument, "p must be 1 or 2");
    }
    if (std::abs(den) <= 1e-14) fail(ErrorKind::DegenerateDenominator, "|Tr H^p| too small");
    return std::abs(num) / std::abs(den);
}

inline ApproxErrorReport error_functionals(const Eigen::MatrixXd& h, const Eigen::MatrixXd& ha, Method m) {
    return {delta_p(h, ha, 1), delta_p(h, ha, 2), m};
}

// Rows needed for the noncompact displacement columns 0..count-1 to be normalized.
inline DisplacementMatrix noncompact_displacement(const Sector& sector, double r, int count, int ceiling = 1 << 14) {
    for (int cut = std::max(64, 4 * count);; cut *= 2) {
        try {
            return displacement_matrix(sector.J, {r, sector.g_phase, false}, cut, count);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::CutoffTooSmall || 2 * cut > ceiling) throw;
        }
    }
}

namespace detail {

inline std::vector<double> level_energies(const Sector& sector, const PhiPolynomial& phi, Method m, double r, int count,
                                          std::vector<std::string>& flags) {
    std::vector<double> e(static_cast<std::size_t>(count), std::numeric_limits<double>::quiet_NaN());
    flags.assign(static_cast<std::size_t>(count), "");
    if (m == Method::Cq) {
        const DisplacementMatrix S = sector.compact ? displacement_matrix(sector.J, {r, sector.g_phase, true}, sector.dim)
                                                    : noncompact_displacement(sector, r, count);
        for (int v = 0; v < count; ++v) e[static_cast<std::size_t>(v)] = energy_cq(sector, phi, S, v);
        return e;
    }
    for (int v = 0; v < count; ++v) {
        try {
            e[static_cast<std::size_t>(v)] = energy_cmf(sector, phi, r, v);
        } catch (const Error& err) {
            flags[static_cast<std::size_t>(v)] = std::string(sl2pd::to_string(err.kind()));
        }
    }
    return e;
}

} // namespace detail

// Full variational ladder with one r per sector. Among several stationary points the
// policy picks the one closest to the exact block in delta^2, or the lowest ground level.
inline VariationalSpectrum variational_spectrum(const Sector& sector, const StructurePolynomial& psi,
                                                const PhiPolynomial& phi, Method method,
                                                RootPolicy policy = RootPolicy::MinDelta2, int count = 0) {
    VariationalSpectrum out;
    out.method = method;
    out.sector_ref = sector.id;
    const int n = count > 0 ? count : (sector.compact ? sector.dim : 1);
    if (sector.compact && n > sector.dim) fail(ErrorKind::DimensionMismatch, "more levels than the sector holds");
    if (method == Method::Linear) {
        out.r_used = sector.compact ? 0.5 * std::atan2(2 * sector.g_mod, sector.a)
                                    : (std::abs(sector.a) > 2 * sector.g_mod ? 0.5 * std::atanh(2 * sector.g_mod / std::abs(sector.a)) : 0.0);
        out.roots_found = {out.r_used};
        out.energies = equidistant_reference(sector, n);
        out.level_flags.assign(static_cast<std::size_t>(n), "");
        return out;
    }
    if (method != Method::Cq && method != Method::Cmf)
        fail(ErrorKind::InvalidArgument, "variational_spectrum handles cq, cmf and linear");
    if (sector.g_mod == 0.0 || sector.dim < 2 || sector.spin() == 0.0) {
        out.r_used = 0.0;
        out.roots_found = {0.0};
        out.energies = detail::level_energies(sector, phi, method, 0.0, n, out.level_flags);
        return out;
    }
    out.roots_found = method == Method::Cq ? solve_stationarity_cq(sector, phi) : solve_stationarity_cmf(sector, phi);
    const bool use_delta = policy == RootPolicy::MinDelta2 && sector.compact;
    Eigen::MatrixXd h;
    if (use_delta) h = assemble_block(sector, psi).dense();
    double best = std::numeric_limits<double>::infinity();
    bool have = false;
    for (double r : out.roots_found) {
        std::vector<std::string> flags;
        std::vector<double> e;
        try {
            e = detail::level_energies(sector, phi, method, r, n, flags);
        } catch (const Error&) {
            continue;
        }
        double score;
        if (use_delta) {
            bool finite = std::all_of(e.begin(), e.end(), [](double x) { return std::isfinite(x); });
            if (!finite) {
                score = std::numeric_limits<double>::infinity();
            } else {
                const DisplacementMatrix S = displacement_matrix(sector.J, {r, sector.g_phase, true}, sector.dim);
                try {
                    score = delta_p(h, approx_hamiltonian(e, S), 2);
                } catch (const Error&) {
                    score = (h - approx_hamiltonian(e, S)).squaredNorm();
                }
            }
        } else {
            score = std::isfinite(e[0]) ? e[0] : std::numeric_limits<double>::infinity();
        }
        if (!have || score < best) {
            best = score;
            have = true;
            out.r_used = r;
            out.energies = e;
            out.level_flags = flags;
        }
    }
    if (!have) fail(ErrorKind::NoRealRoot, "no usable stationary point in sector " + sector.id);
    return out;
}

} // namespace sl2pd

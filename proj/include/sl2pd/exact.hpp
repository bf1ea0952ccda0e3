// exact.hpp - Sector blocks, exact tridiagonal diagonalization, truncated su(1,1)
// spectra, the Bethe-root check of eigenvectors and the linear-case reference spectrum.

#pragma once

#include "sl2pd/algebra.hpp"
#include "sl2pd/errors.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

namespace sl2pd {

struct TridiagonalBlock {
    std::vector<double> diag;
    std::vector<double> offdiag;  // nonnegative
    std::string sector_ref;

    int size() const noexcept { return static_cast<int>(diag.size()); }

    Eigen::MatrixXd dense() const {
        const int n = size();
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < n; ++i) h(i, i) = diag[static_cast<std::size_t>(i)];
        for (int i = 0; i + 1 < n; ++i) {
            h(i, i + 1) = offdiag[static_cast<std::size_t>(i)];
            h(i + 1, i) = offdiag[static_cast<std::size_t>(i)];
        }
        return h;
    }
};

struct EigenSolution {
    Eigen::VectorXd energies;    // ascending
    Eigen::MatrixXd amplitudes;  // column v = eigenvector v in the ladder basis
    double residual{0.0};
    int truncation{0};           // block size actually diagonalized
    std::vector<std::vector<int>> degenerate_clusters{};
};

// diag[v] = C + a(l0+v), offdiag[v] = |g| sqrt(Psi(l0+v+1)).
inline TridiagonalBlock assemble_block(const Sector& sector, const StructurePolynomial& psi, int dim_override = 0,
                                       const Tolerances& tol = {}) {
    const int dim = dim_override > 0 ? dim_override : sector.dim;
    if (dim < 1) fail(ErrorKind::InvalidArgument, "block dimension must be >= 1");
    TridiagonalBlock b;
    b.sector_ref = sector.id;
    b.diag.resize(static_cast<std::size_t>(dim));
    b.offdiag.resize(static_cast<std::size_t>(dim - 1));
    const double l0 = sector.l0();
    for (int v = 0; v < dim; ++v) b.diag[static_cast<std::size_t>(v)] = sector.c_shift + sector.a * (l0 + v);
    for (int v = 0; v + 1 < dim; ++v)
        b.offdiag[static_cast<std::size_t>(v)] = sector.g_mod * ladder_norm(psi, sector.lowest_weight, v, tol);
    return b;
}

namespace detail {

inline void fix_column_signs(Eigen::MatrixXd& q) {
    for (Eigen::Index c = 0; c < q.cols(); ++c) {
        for (Eigen::Index r = 0; r < q.rows(); ++r) {
            if (std::abs(q(r, c)) > 1e-14) {
                if (q(r, c) < 0.0) q.col(c) *= -1.0;
                break;
            }
        }
    }
}

inline double tridiagonal_residual(const TridiagonalBlock& b, const Eigen::VectorXd& e, const Eigen::MatrixXd& q) {
    const int n = b.size();
    double res = 0.0;
    for (Eigen::Index c = 0; c < q.cols(); ++c) {
        for (int i = 0; i < n; ++i) {
            double hq = b.diag[static_cast<std::size_t>(i)] * q(i, c);
            if (i > 0) hq += b.offdiag[static_cast<std::size_t>(i - 1)] * q(i - 1, c);
            if (i + 1 < n) hq += b.offdiag[static_cast<std::size_t>(i)] * q(i + 1, c);
            res = std::max(res, std::abs(hq - e(c) * q(i, c)));
        }
    }
    return res;
}

inline std::vector<std::vector<int>> clusters(const Eigen::VectorXd& e) {
    std::vector<std::vector<int>> out;
    const double radius = e.size() ? std::max(std::abs(e(0)), std::abs(e(e.size() - 1))) : 0.0;
    const double gap = 1e-12 * std::max(radius, 1.0);
    for (Eigen::Index i = 0; i + 1 < e.size();) {
        Eigen::Index j = i;
        while (j + 1 < e.size() && e(j + 1) - e(j) < gap) ++j;
        if (j > i) {
            std::vector<int> c;
            for (Eigen::Index k = i; k <= j; ++k) c.push_back(static_cast<int>(k));
            out.push_back(c);
        }
        i = j + 1;
    }
    return out;
}

// Number of eigenvalues strictly below x (Sturm sequence of the LDL^T pivots).
inline int sturm_count(const TridiagonalBlock& b, double x) {
    int count = 0;
    double d = 1.0;
    for (int i = 0; i < b.size(); ++i) {
        const double off = i > 0 ? b.offdiag[static_cast<std::size_t>(i - 1)] : 0.0;
        d = b.diag[static_cast<std::size_t>(i)] - x - (i > 0 ? off * off / d : 0.0);
        if (d == 0.0) d = -std::numeric_limits<double>::epsilon() * (std::abs(x) + off + 1.0);
        if (d < 0.0) ++count;
    }
    return count;
}

// k-th smallest eigenvalue (0-based) by bisection on the Sturm count.
inline double bisect_eigenvalue(const TridiagonalBlock& b, int k, double lo, double hi) {
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (sturm_count(b, mid) > k) hi = mid;
        else lo = mid;
    }
    return 0.5 * (lo + hi);
}

// Solves (T - shift) x = rhs for tridiagonal T with partial pivoting.
inline std::vector<double> tridiagonal_solve(const TridiagonalBlock& b, double shift, std::vector<double> rhs) {
    const int n = b.size();
    std::vector<double> d(n), u(n, 0.0), u2(n, 0.0);
    for (int i = 0; i < n; ++i) d[i] = b.diag[static_cast<std::size_t>(i)] - shift;
    for (int i = 0; i + 1 < n; ++i) u[i] = b.offdiag[static_cast<std::size_t>(i)];
    // Row i holds (d[i], u[i], u2[i]) at columns (i, i+1, i+2) after elimination.
    std::vector<double> sub(n, 0.0);
    for (int i = 1; i < n; ++i) sub[i] = b.offdiag[static_cast<std::size_t>(i - 1)];
    const double tiny = 1e-300;
    for (int i = 0; i + 1 < n; ++i) {
        if (std::abs(sub[i + 1]) > std::abs(d[i])) {
            // swap rows i and i+1
            const double nd = b.diag[static_cast<std::size_t>(i + 1)] - shift;
            const double nu = i + 2 < n ? b.offdiag[static_cast<std::size_t>(i + 1)] : 0.0;
            const double od = d[i], ou = u[i], ou2 = u2[i];
            d[i] = sub[i + 1];
            u[i] = nd;
            u2[i] = nu;
            std::swap(rhs[i], rhs[i + 1]);
            const double f = od / d[i];
            d[i + 1] = ou - f * u[i];
            u[i + 1] = ou2 - f * u2[i];
            rhs[i + 1] -= f * rhs[i];
        } else {
            if (d[i] == 0.0) d[i] = tiny;
            const double f = sub[i + 1] / d[i];
            d[i + 1] = d[i + 1] - f * u[i];
            // u[i+1] keeps the original superdiagonal
            rhs[i + 1] -= f * rhs[i];
        }
    }
    if (d[n - 1] == 0.0) d[n - 1] = tiny;
    std::vector<double> x(n, 0.0);
    for (int i = n - 1; i >= 0; --i) {
        double s = rhs[i];
        if (i + 1 < n) s -= u[i] * x[i + 1];
        if (i + 2 < n) s -= u2[i] * x[i + 2];
        x[i] = s / d[i];
    }
    return x;
}

} // namespace detail

// Dense tridiagonal eigensolve (QL with implicit shifts).
inline EigenSolution diagonalize(const TridiagonalBlock& block) {
    const int n = block.size();
    if (n < 1) fail(ErrorKind::InvalidArgument, "empty block");
    Eigen::VectorXd d(n);
    Eigen::VectorXd e(std::max(n - 1, 0));
    for (int i = 0; i < n; ++i) d(i) = block.diag[static_cast<std::size_t>(i)];
    for (int i = 0; i + 1 < n; ++i) e(i) = block.offdiag[static_cast<std::size_t>(i)];
    EigenSolution sol;
    sol.truncation = n;
    if (n == 1) {
        sol.energies = d;
        sol.amplitudes = Eigen::MatrixXd::Ones(1, 1);
        return sol;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(d, e, Eigen::ComputeEigenvectors);
    if (es.info() != Eigen::Success) fail(ErrorKind::ConvergenceFailure, "tridiagonal eigensolver did not converge");
    sol.energies = es.eigenvalues();
    sol.amplitudes = es.eigenvectors();
    detail::fix_column_signs(sol.amplitudes);
    sol.residual = detail::tridiagonal_residual(block, sol.energies, sol.amplitudes);
    sol.degenerate_clusters = detail::clusters(sol.energies);
    return sol;
}

// Lowest k eigenpairs of a noncompact ladder, doubling the truncation from 4k until
// the lowest k values move by less than tol.
inline EigenSolution truncated_spectrum(const Sector& sector, const StructurePolynomial& psi, int k, double tol,
                                        int ceiling = 1 << 16) {
    if (sector.compact) fail(ErrorKind::InvalidArgument, "truncated_spectrum needs a noncompact sector");
    if (k < 1) fail(ErrorKind::InvalidArgument, "k must be >= 1");
    auto lowest = [&](const TridiagonalBlock& b) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (int i = 0; i < b.size(); ++i) {
            const double r = (i > 0 ? b.offdiag[static_cast<std::size_t>(i - 1)] : 0.0) +
                             (i + 1 < b.size() ? b.offdiag[static_cast<std::size_t>(i)] : 0.0);
            lo = std::min(lo, b.diag[static_cast<std::size_t>(i)] - r);
            hi = std::max(hi, b.diag[static_cast<std::size_t>(i)] + r);
        }
        const double pad = 1e-12 * std::max({std::abs(lo), std::abs(hi), 1.0});
        std::vector<double> vals(static_cast<std::size_t>(k));
        for (int j = 0; j < k; ++j) vals[static_cast<std::size_t>(j)] = detail::bisect_eigenvalue(b, j, lo - pad, hi + pad);
        return vals;
    };
    int dim = 4 * k;
    TridiagonalBlock block = assemble_block(sector, psi, dim);
    std::vector<double> prev = lowest(block);
    while (true) {
        const int next = 2 * dim;
        if (next > ceiling)
            fail(ErrorKind::NoConvergence, "truncation ceiling reached in sector " + sector.id);
        TridiagonalBlock nb = assemble_block(sector, psi, next);
        std::vector<double> cur = lowest(nb);
        double move = 0.0;
        for (int j = 0; j < k; ++j)
            move = std::max(move, std::abs(cur[static_cast<std::size_t>(j)] - prev[static_cast<std::size_t>(j)]));
        dim = next;
        block = std::move(nb);
        prev = std::move(cur);
        if (move < tol) break;
    }
    EigenSolution sol;
    sol.truncation = dim;
    sol.energies = Eigen::Map<Eigen::VectorXd>(prev.data(), k);
    sol.amplitudes = Eigen::MatrixXd::Zero(dim, k);
    // inverse iteration for the eigenvectors of the converged block
    for (int j = 0; j < k; ++j) {
        const double shift = prev[static_cast<std::size_t>(j)] + 1e-13 * std::max(1.0, std::abs(prev[static_cast<std::size_t>(j)]));
        std::vector<double> x(static_cast<std::size_t>(dim), 1.0);
        for (int it = 0; it < 4; ++it) {
            x = detail::tridiagonal_solve(block, shift, x);
            double nrm = 0.0;
            for (double v : x) nrm += v * v;
            nrm = std::sqrt(nrm);
            for (double& v : x) v /= nrm;
            for (int p = 0; p < j; ++p) {
                double dot = 0.0;
                for (int i = 0; i < dim; ++i) dot += sol.amplitudes(i, p) * x[static_cast<std::size_t>(i)];
                for (int i = 0; i < dim; ++i) x[static_cast<std::size_t>(i)] -= dot * sol.amplitudes(i, p);
            }
        }
        double nrm = 0.0;
        for (double v : x) nrm += v * v;
        nrm = std::sqrt(nrm);
        for (int i = 0; i < dim; ++i) sol.amplitudes(i, j) = x[static_cast<std::size_t>(i)] / nrm;
    }
    detail::fix_column_signs(sol.amplitudes);
    sol.residual = detail::tridiagonal_residual(block, sol.energies, sol.amplitudes);
    return sol;
}

struct BethePolynomial {
    std::vector<std::complex<double>> roots;
    double leading{0.0};
    double energy_residual{0.0};
    double boundary_residual{0.0};
    bool degenerate{false};  // leading coefficient vanished; boundary check skipped
};

// Rewrites each eigenvector in the monomial basis V+^f|l0> and checks that the roots
// of sum_f Q_f z^f reproduce the energy E = C + a(l0+2J) - |g| sum roots.
inline std::vector<BethePolynomial> bethe_check(const EigenSolution& sol, const Sector& sector,
                                                const StructurePolynomial& psi) {
    if (!sector.compact) fail(ErrorKind::InvalidArgument, "Bethe representation needs a compact sector");
    const int dim = sector.dim;
    if (sol.amplitudes.rows() != dim) fail(ErrorKind::DimensionMismatch, "eigenvectors do not match the sector");
    // cumulative ladder norms prod_{k=1..f} Psi(l0+k)
    std::vector<double> norm(static_cast<std::size_t>(dim), 1.0);
    for (int f = 1; f < dim; ++f) {
        const double lad = ladder_norm(psi, sector.lowest_weight, f - 1);
        norm[static_cast<std::size_t>(f)] = norm[static_cast<std::size_t>(f - 1)] * lad;
    }
    const double top = sector.c_shift + sector.a * (sector.l0() + 2.0 * sector.spin());
    const double g = sector.g_mod;
    std::vector<BethePolynomial> out;
    for (Eigen::Index v = 0; v < sol.amplitudes.cols(); ++v) {
        const double E = sol.energies(v);
        std::vector<double> Q(static_cast<std::size_t>(dim));
        for (int f = 0; f < dim; ++f) Q[static_cast<std::size_t>(f)] = sol.amplitudes(f, v) / norm[static_cast<std::size_t>(f)];
        double qmax = 0.0;
        for (double q : Q) qmax = std::max(qmax, std::abs(q));
        BethePolynomial bp;
        bp.leading = Q.back();
        if (dim == 1) {
            bp.energy_residual = std::abs(E - top);
            out.push_back(bp);
            continue;
        }
        if (std::abs(bp.leading) < 1e-12 * qmax) {
            bp.degenerate = true;
            out.push_back(bp);
            continue;
        }
        const int deg = dim - 1;
        Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(deg, deg);
        for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
        for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -Q[static_cast<std::size_t>(i)] / bp.leading;
        Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
        std::complex<double> sum = 0.0;
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
            bp.roots.push_back(es.eigenvalues()(i));
            sum += es.eigenvalues()(i);
        }
        const double scale = std::max({std::abs(E), std::abs(top), g, 1.0});
        bp.energy_residual = std::abs(std::complex<double>(E) - (top - g * sum)) / scale;
        bp.boundary_residual =
            std::abs((top - E) * bp.leading + g * Q[static_cast<std::size_t>(deg - 1)]) / (scale * std::abs(bp.leading));
        out.push_back(bp);
    }
    return out;
}

// E_v = C + a(l0 +- J) + (-+J + v) sqrt(a^2 +- 4|g|^2 phi0); noncompact branch scaled by
// sign(a). phi0 is the constant Phi of a linear sector (1 for unit-normalized ladders).
inline std::vector<double> equidistant_reference(const Sector& sector, int count = 0, double phi0 = 1.0) {
    const int n = count > 0 ? count : sector.dim;
    const double J = sector.spin();
    const double a = sector.a;
    const double g2 = sector.g_mod * sector.g_mod * phi0;
    std::vector<double> out(static_cast<std::size_t>(n));
    if (sector.compact) {
        const double w = std::sqrt(a * a + 4.0 * g2);
        for (int v = 0; v < n; ++v) out[static_cast<std::size_t>(v)] = sector.c_prime() + (-J + v) * w;
    } else {
        const double disc = a * a - 4.0 * g2;
        if (disc < 0.0) fail(ErrorKind::ImaginaryFrequency, "a^2 < 4|g|^2 in sector " + sector.id);
        const double w = (a < 0.0 ? -1.0 : 1.0) * std::sqrt(disc);
        for (int v = 0; v < n; ++v) out[static_cast<std::size_t>(v)] = sector.c_prime() + (J + v) * w;
    }
    return out;
}

// Uses the constant value of Phi when the sector is linear, the unit ladder otherwise.
inline std::vector<double> equidistant_reference(const Sector& sector, const PhiPolynomial& phi, int count = 0) {
    const Polynomial p = phi.poly().trimmed(1e-12 * std::max(1.0, phi.poly().max_abs_coeff()));
    return equidistant_reference(sector, count, p.degree() == 0 ? p[0] : 1.0);
}

} // namespace sl2pd

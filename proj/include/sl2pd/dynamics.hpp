// dynamics.hpp - Quasiclassical Bloch-type flows on the sl(2) sphere/hyperboloid and
// quantum propagators (exact spectral and variational) with observable time series.

#pragma once

#include "sl2pd/algebra.hpp"
#include "sl2pd/catalog.hpp"
#include "sl2pd/errors.hpp"
#include "sl2pd/exact.hpp"
#include "sl2pd/gcs.hpp"
#include "sl2pd/variational.hpp"

#include <Eigen/Dense>
#include <boost/numeric/odeint.hpp>

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace sl2pd {

enum class FlowVariant { Cq, Cmf, Linear };

inline std::string to_string(FlowVariant v) {
    switch (v) {
    case FlowVariant::Cq: return "cq";
    case FlowVariant::Cmf: return "cmf";
    case FlowVariant::Linear: return "linear";
    }
    return "unknown";
}

// y = (y1, y2, y0)
struct BlochState {
    std::array<double, 3> y{0.0, 0.0, 0.0};
    Rational J{0};
    bool compact{true};

    double casimir() const noexcept {
        const double s = compact ? 1.0 : -1.0;
        return y[0] * y[0] + y[1] * y[1] + s * y[2] * y[2];
    }
};

// Coherent point of the displaced lowest state; phase is the chart angle q.
inline BlochState bloch_from_gcs(const Rational& J, double r, double phase, bool compact) {
    const double j = to_double(J);
    const auto k = trig_kernels(r, compact);
    BlochState b;
    b.J = J;
    b.compact = compact;
    b.y = {-j * k.s2 * std::cos(phase), j * k.s2 * std::sin(phase), (compact ? -j : j) * k.c2};
    return b;
}

// Flow data for one sector: H(y) = a y0 + 2 W(y0) (Re g y1 - Im g y2), with
// W = 1 (linear), sqrt(Phi) (cmf) or the cq weight Theta.
class FlowModel {
public:
    FlowModel(const Sector& sector, PhiPolynomial phi, FlowVariant variant)
        : sector_(sector), phi_(std::move(phi)), dphi_(phi_.poly().derivative()), variant_(variant) {
        re_g_ = sector.g_mod * std::cos(sector.g_phase);
        im_g_ = sector.g_mod * std::sin(sector.g_phase);
        if (variant_ == FlowVariant::Cq) {
            if (sector.spin() <= 0.0) fail(ErrorKind::InvalidArgument, "cq flow needs J > 0");
            if (sector.compact) {
                const int n = static_cast<int>(2 * sector.spin() + 0.5);
                for (int f = 0; f < n; ++f) logb_.push_back(detail::log_b(sector_, phi_, f));
            }
        }
    }

    const Sector& sector() const noexcept { return sector_; }
    FlowVariant variant() const noexcept { return variant_; }

    // (W, dW/dy0)
    std::pair<double, double> weight(double y0) const {
        switch (variant_) {
        case FlowVariant::Linear: return {1.0, 0.0};
        case FlowVariant::Cmf: {
            // trial stages of the stepper may leave the sphere; the flow itself never does
            if (sector_.compact) y0 = std::clamp(y0, -sector_.spin(), sector_.spin());
            const double ph = phi_(y0);
            if (ph < -1e-10) fail(ErrorKind::NegativePhi, "Phi(y0) < 0 along the cmf flow");
            if (ph <= 0.0) return {0.0, 0.0};
            const double sq = std::sqrt(ph);
            return {sq, dphi_(y0) / (2.0 * sq)};
        }
        case FlowVariant::Cq: return sector_.compact ? theta_compact(y0) : theta_noncompact(y0);
        }
        return {1.0, 0.0};
    }

    double energy(const BlochState& s) const {
        const auto [w, dw] = weight(s.y[2]);
        (void)dw;
        return sector_.a * s.y[2] + 2.0 * w * (re_g_ * s.y[0] - im_g_ * s.y[1]);
    }

    std::array<double, 3> grad_h(const std::array<double, 3>& y) const {
        const auto [w, dw] = weight(y[2]);
        return {2.0 * w * re_g_, -2.0 * w * im_g_, sector_.a + 2.0 * dw * (re_g_ * y[0] - im_g_ * y[1])};
    }

    double re_g() const noexcept { return re_g_; }
    double im_g() const noexcept { return im_g_; }
    const PhiPolynomial& phi() const noexcept { return phi_; }

private:
    // Theta(y0) = (1/2J) sum_f B_f u^f (1-u)^{2J-1-f}, u = (J + y0)/2J.
    std::pair<double, double> theta_compact(double y0) const {
        const double J = sector_.spin();
        const int n = static_cast<int>(logb_.size());
        const double u = std::clamp((J + y0) / (2.0 * J), 0.0, 1.0);
        double th = 0.0, dth = 0.0;
        for (int f = 0; f < n; ++f) {
            if (!std::isfinite(logb_[static_cast<std::size_t>(f)])) continue;
            const double b = std::exp(logb_[static_cast<std::size_t>(f)]);
            const int e = n - 1 - f;
            th += b * std::pow(u, f) * std::pow(1.0 - u, e);
            double d = 0.0;
            if (f > 0) d += f * std::pow(u, f - 1) * std::pow(1.0 - u, e);
            if (e > 0) d -= e * std::pow(u, f) * std::pow(1.0 - u, e - 1);
            dth += b * d;
        }
        return {th / (2.0 * J), dth / (4.0 * J * J)};
    }

    // Theta(y0) = (1/2J) (2J/(y0+J))^{2J+1} sum_f B_f w^f, w = (y0-J)/(y0+J).
    std::pair<double, double> theta_noncompact(double y0) const {
        const double J = sector_.spin();
        if (y0 < J - 1e-10) fail(ErrorKind::InvalidArgument, "noncompact cq flow needs y0 >= J");
        const double w = std::max(0.0, (y0 - J) / (y0 + J));
        const double dw = 2.0 * J / ((y0 + J) * (y0 + J));
        const double P = std::pow(2.0 * J / (y0 + J), 2.0 * J + 1.0);
        const double dP = -(2.0 * J + 1.0) * P / (y0 + J);
        detail::LogBTable lb(sector_, phi_);
        const double s0 = detail::truncated_sum([&](int f) { return detail::pow_term(lb(f), w, f, 1.0, 0.0); });
        const double s1 = detail::truncated_sum(
            [&](int f) { return f == 0 ? 0.0 : f * detail::pow_term(lb(f), w, f - 1, 1.0, 0.0); });
        return {P * s0 / (2.0 * J), (dP * s0 + P * s1 * dw) / (2.0 * J)};
    }

    Sector sector_;
    PhiPolynomial phi_;
    Polynomial dphi_;
    FlowVariant variant_;
    double re_g_{0.0}, im_g_{0.0};
    std::vector<double> logb_;
};

// dy/dt = (1/2) grad H x grad C, grad C = 2 (y1, y2, +-y0), standard cross product in
// the (y1, y2, y0) ordering.
inline std::array<double, 3> bloch_rhs(const BlochState& state, const FlowModel& model) {
    const auto A = model.grad_h(state.y);
    const double s = state.compact ? 1.0 : -1.0;
    const std::array<double, 3> B{2.0 * state.y[0], 2.0 * state.y[1], 2.0 * s * state.y[2]};
    return {0.5 * (A[1] * B[2] - A[2] * B[1]), 0.5 * (A[2] * B[0] - A[0] * B[2]), 0.5 * (A[0] * B[1] - A[1] * B[0])};
}

// Canonical chart p = y0, cos q = -y1/rho, sin q = y2/rho, rho = sqrt(+-(J^2 - p^2)).
// Returns (dq/dt, dp/dt) for the cmf Hamiltonian, consistent with bloch_rhs.
inline std::pair<double, double> hamilton_rhs(double p, double q, const Sector& sector, const PhiPolynomial& phi) {
    const double J = sector.spin();
    if (sector.compact ? std::abs(p) >= J - 1e-12 : p <= J + 1e-12)
        fail(ErrorKind::ChartSingularity, "canonical chart breaks down at p = " + std::to_string(p));
    const double sgn = sector.compact ? 1.0 : -1.0;
    const double rho2 = sgn * (J * J - p * p);
    const double ph = phi(p);
    if (ph < -1e-10) fail(ErrorKind::NegativePhi, "Phi(p) < 0 in the canonical flow");
    const double W = rho2 * ph;
    const double dW = sgn * (-2.0 * p) * ph + rho2 * phi.derivative(p);
    const double re = sector.g_mod * std::cos(sector.g_phase);
    const double im = sector.g_mod * std::sin(sector.g_phase);
    const double sq = std::sqrt(std::max(W, 0.0));
    const double c = std::cos(q), s = std::sin(q);
    const double dq = -sector.a + (re * c + im * s) * dW / sq;
    const double dp = 2.0 * sq * (re * s - im * c);
    return {dq, dp};
}

struct Trajectory {
    std::vector<double> times;
    std::vector<BlochState> states;
    std::vector<double> energies;
    double casimir_drift{0.0};
    double energy_drift{0.0};  // relative to max(|H(0)|, J max(|a|, |g|))
    std::string flag;          // empty, or the error kind that stopped the run
};

// Adaptive embedded Runge-Kutta-Fehlberg 7(8) with abs = rel = tol, sampled on an even grid.
inline Trajectory integrate(const FlowModel& model, const BlochState& y0, double t0, double t1, int samples,
                            double tol = 1e-10) {
    namespace ode = boost::numeric::odeint;
    using state_t = std::array<double, 3>;
    if (samples < 2) fail(ErrorKind::InvalidArgument, "need at least two samples");
    const double J = to_double(y0.J);
    const double shell = y0.compact ? J * J : -J * J;
    if (std::abs(y0.casimir() - shell) > 1e-6 * std::max(1.0, J * J))
        fail(ErrorKind::InvalidArgument, "initial state is off the shell");

    Trajectory tr;
    std::vector<double> grid(static_cast<std::size_t>(samples));
    for (int i = 0; i < samples; ++i) grid[static_cast<std::size_t>(i)] = t0 + (t1 - t0) * i / (samples - 1);

    const double c0 = y0.casimir();
    const double h0 = model.energy(y0);
    const double scale = std::max(std::abs(h0), J * std::max(std::abs(model.sector().a), model.sector().g_mod));
    auto rhs = [&](const state_t& y, state_t& dy, double) {
        BlochState s{y, y0.J, y0.compact};
        dy = bloch_rhs(s, model);
    };
    auto observer = [&](const state_t& y, double t) {
        BlochState s{y, y0.J, y0.compact};
        const double e = model.energy(s);
        tr.times.push_back(t);
        tr.states.push_back(s);
        tr.energies.push_back(e);
        tr.casimir_drift = std::max(tr.casimir_drift, std::abs(s.casimir() - c0));
        tr.energy_drift = std::max(tr.energy_drift, std::abs(e - h0) / (scale > 0 ? scale : 1.0));
    };
    state_t y = y0.y;
    auto stepper = ode::make_controlled(tol, tol, ode::runge_kutta_fehlberg78<state_t>());
    const double dt0 = (t1 - t0) / (10.0 * samples);
    try {
        ode::integrate_times(stepper, rhs, y, grid.begin(), grid.end(), dt0, observer,
                             ode::max_step_checker(1'000'000));
    } catch (const Error& e) {
        tr.flag = std::string(to_string(e.kind()));
    } catch (const std::exception&) {
        tr.flag = std::string(to_string(ErrorKind::StepFailure));
    }
    return tr;
}

using ComplexMatrix = Eigen::MatrixXcd;

// Gauge frame: H(g) = D H(|g|) D^dagger with D = diag(e^{i f theta}).
inline ComplexMatrix to_original_frame(const ComplexMatrix& u, double theta) {
    if (theta == 0.0) return u;
    const Eigen::Index n = u.rows();
    Eigen::VectorXcd d(n);
    for (Eigen::Index f = 0; f < n; ++f) d(f) = std::polar(1.0, static_cast<double>(f) * theta);
    return d.asDiagonal() * u * d.conjugate().asDiagonal();
}

// S diag(exp(-i t E_v)) S^T
inline ComplexMatrix qa_propagator(const std::vector<double>& energies, const DisplacementMatrix& S, double t) {
    if (static_cast<Eigen::Index>(energies.size()) != S.entries.cols())
        fail(ErrorKind::DimensionMismatch, "spectrum and displacement sizes differ");
    Eigen::VectorXcd ph(S.entries.cols());
    for (Eigen::Index v = 0; v < ph.size(); ++v) ph(v) = std::polar(1.0, -t * energies[static_cast<std::size_t>(v)]);
    const ComplexMatrix Sc = S.entries.cast<std::complex<double>>();
    return Sc * ph.asDiagonal() * Sc.transpose();
}

// Q diag(exp(-i t E)) Q^T
inline ComplexMatrix exact_propagator(const EigenSolution& sol, double t) {
    Eigen::VectorXcd ph(sol.energies.size());
    for (Eigen::Index v = 0; v < ph.size(); ++v) ph(v) = std::polar(1.0, -t * sol.energies(v));
    const ComplexMatrix Q = sol.amplitudes.cast<std::complex<double>>();
    return Q * ph.asDiagonal() * Q.transpose();
}

struct ObservableSeries {
    std::vector<double> times;
    std::vector<double> values;
    std::string tag;
    double max_imag{0.0};
};

struct WeightedState {
    double weight{1.0};
    Eigen::VectorXcd amps;
};

// <F(t)> = sum_k w_k <psi_k| U(t)^dagger F U(t) |psi_k>
inline ObservableSeries observable_series(const std::vector<WeightedState>& rho, const Eigen::MatrixXd& F,
                                          const std::vector<double>& times,
                                          const std::function<ComplexMatrix(double)>& propagator,
                                          std::string tag = "") {
    ObservableSeries out;
    out.tag = std::move(tag);
    if (F.rows() != F.cols()) fail(ErrorKind::DimensionMismatch, "observable must be square");
    if ((F - F.transpose()).cwiseAbs().maxCoeff() > 1e-12) fail(ErrorKind::InvalidArgument, "observable must be symmetric");
    for (const auto& ws : rho)
        if (ws.amps.size() != F.rows()) fail(ErrorKind::DimensionMismatch, "state and observable sizes differ");
    const ComplexMatrix Fc = F.cast<std::complex<double>>();
    for (double t : times) {
        const ComplexMatrix U = propagator(t);
        if (U.rows() != F.rows()) fail(ErrorKind::DimensionMismatch, "propagator and observable sizes differ");
        std::complex<double> acc = 0.0;
        for (const auto& ws : rho) {
            const Eigen::VectorXcd psi = U * ws.amps;
            acc += ws.weight * psi.dot(Fc * psi);
        }
        out.times.push_back(t);
        out.values.push_back(acc.real());
        out.max_imag = std::max(out.max_imag, std::abs(acc.imag()));
    }
    return out;
}

// Diagonal observables in the ladder basis |l0 + f>: V0, projectors and the number
// operators of the catalog families recovered from their linear relations.
inline Eigen::MatrixXd ladder_observable(const ModelSpec& model, const SectorLabels& lab, const Sector& sector,
                                         const std::string& name) {
    const int n = sector.dim;
    Eigen::VectorXd d(n);
    const double l0 = sector.l0();
    auto fill = [&](auto fn) {
        for (int f = 0; f < n; ++f) d(f) = fn(l0 + f);
    };
    if (name == "V0") {
        fill([](double v0) { return v0; });
    } else if (name.rfind("projector:", 0) == 0) {
        const int k = std::stoi(name.substr(10));
        if (k < 0 || k >= n) fail(ErrorKind::InvalidArgument, "projector level out of range");
        d.setZero();
        d(k) = 1.0;
    } else {
        const auto l = integrals(model, lab);
        const double nn = model.n;
        if (model.family == Family::Dicke && name == "inversion") {
            fill([](double v0) { return 2.0 * v0; });
        } else if (model.family == Family::Dicke && name == "photons") {
            const double l1 = to_double(l.at("l1"));
            fill([&](double v0) { return l1 - nn * v0; });
        } else if (model.family == Family::TwoMode && (name == "n1" || name == "n2")) {
            const double l1 = to_double(l.at("l1"));
            const double m = model.m;
            if (name == "n1") fill([&](double v0) { return m * v0 + l1; });
            else fill([&](double v0) { return l1 - nn * v0; });
        } else if (model.family == Family::Multimode && name.size() >= 2 && name[0] == 'n') {
            const int i = std::stoi(name.substr(1));
            const auto lm = detail::multimode_integrals(model.m, model.n, lab.kappas, lab.s);
            if (i == 0) {
                const double v = to_double(lm[static_cast<std::size_t>(model.m)]);
                fill([&](double v0) { return v - nn * v0; });
            } else if (i >= 1 && i <= model.m) {
                const auto c = detail::multimode_offsets(model.m, model.n, lm);
                const double ci = to_double(c[static_cast<std::size_t>(i - 1)]);
                fill([&](double v0) { return v0 + ci; });
            } else {
                fail(ErrorKind::InvalidArgument, "no mode " + name);
            }
        } else {
            fail(ErrorKind::InvalidArgument, "unknown observable '" + name + "' for " + to_string(model.family));
        }
    }
    return d.asDiagonal();
}

} // namespace sl2pd

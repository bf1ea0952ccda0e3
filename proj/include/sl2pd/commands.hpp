// commands.hpp - spectrum, compare, sweep and dynamics runs producing ResultTables.

#pragma once

#include "sl2pd/config.hpp"
#include "sl2pd/dynamics.hpp"
#include "sl2pd/table.hpp"
#include "sl2pd/variational.hpp"

#include <complex>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace sl2pd {

namespace detail {

constexpr double nan_v = std::numeric_limits<double>::quiet_NaN();

inline std::string describe(const Error& e) { return e.what(); }

struct LevelSet {
    Method method{Method::Exact};
    std::vector<double> energies;
    std::vector<std::string> flags;
    double r{nan_v};
    double delta1{nan_v}, delta2{nan_v};
    std::string flag;  // whole-method failure or delta diagnostics
};

struct SectorRun {
    std::string id;
    double J{nan_v};
    std::vector<double> exact;
    std::vector<double> equidistant;
    std::vector<LevelSet> methods;
    std::string flag;  // whole-sector failure
};

inline std::vector<Method> with_exact(std::vector<Method> m) {
    std::vector<Method> out{Method::Exact};
    for (Method x : m)
        if (x != Method::Exact) out.push_back(x);
    return out;
}

inline void fill_deltas(LevelSet& ls, const CatalogSector& cs) {
    const Sector& s = cs.sector;
    if (!s.compact || ls.method == Method::Exact) return;
    for (double e : ls.energies)
        if (!std::isfinite(e)) {
            ls.flag += (ls.flag.empty() ? "" : ";") + std::string("delta undefined: missing level");
            return;
        }
    try {
        const auto h = assemble_block(s, cs.psi).dense();
        const auto S = displacement_matrix(s.J, {ls.r, 0.0, true}, s.dim);
        const auto rep = error_functionals(h, approx_hamiltonian(ls.energies, S), ls.method);
        ls.delta1 = rep.delta1;
        ls.delta2 = rep.delta2;
    } catch (const Error& e) {
        ls.flag += (ls.flag.empty() ? "" : ";") + describe(e);
    }
}

inline LevelSet run_method(const RunConfig& cfg, const CatalogSector& cs, const PhiPolynomial& phi, Method m,
                           int count) {
    LevelSet ls;
    ls.method = m;
    try {
        if (m == Method::ClosedForm) {
            const auto cf = closed_form_resonance(cfg.model, cs.labels);
            ls.energies = cf.energies;
            ls.r = 0.5 * std::acos(cf.cos2r);
            ls.flags.assign(ls.energies.size(), "");
            for (std::size_t v = 0; v < ls.energies.size(); ++v)
                if (!std::isfinite(ls.energies[v])) ls.flags[v] = std::string(to_string(ErrorKind::NegativePhiArgument));
        } else {
            const auto vs = variational_spectrum(cs.sector, cs.psi, phi, m, cfg.method.policy, count);
            ls.energies = vs.energies;
            ls.flags = vs.level_flags;
            ls.r = vs.r_used;
        }
        fill_deltas(ls, cs);
    } catch (const Error& e) {
        ls.energies.clear();
        ls.flag = describe(e);
    }
    return ls;
}

inline SectorRun run_sector(const RunConfig& cfg, const CatalogSector& cs, const std::vector<Method>& methods) {
    SectorRun run;
    run.id = cs.sector.id;
    run.J = cs.sector.spin();
    const Sector& s = cs.sector;
    const PhiPolynomial phi = phi_from_psi(cs.psi, s);
    int count;
    if (s.compact) {
        const auto sol = diagonalize(assemble_block(s, cs.psi));
        run.exact.assign(sol.energies.data(), sol.energies.data() + sol.energies.size());
        count = s.dim;
    } else {
        const auto sol = truncated_spectrum(s, cs.psi, cfg.method.levels, cfg.method.tol, cfg.method.ceiling);
        run.exact.assign(sol.energies.data(), sol.energies.data() + sol.energies.size());
        count = cfg.method.levels;
    }
    try {
        run.equidistant = equidistant_reference(s, phi, count);
    } catch (const Error&) {
        run.equidistant.clear();
    }
    for (Method m : methods) {
        if (m == Method::Exact) {
            LevelSet ls;
            ls.energies = run.exact;
            ls.flags.assign(run.exact.size(), "");
            run.methods.push_back(ls);
        } else {
            run.methods.push_back(run_method(cfg, cs, phi, m, s.compact ? 0 : count));
        }
    }
    return run;
}

// Every job yields its sectors (noncompact labels may give two spins); a failing job
// becomes a single flagged run.
inline std::vector<SectorRun> run_all(const RunConfig& cfg, const std::vector<Method>& methods, int& failed) {
    std::vector<SectorRun> out;
    failed = 0;
    for (const auto& lab : cfg.jobs) {
        try {
            for (const auto& cs : make_sectors(cfg.model, lab, cfg.method.truncation)) {
                try {
                    out.push_back(run_sector(cfg, cs, methods));
                } catch (const Error& e) {
                    SectorRun bad;
                    bad.id = cs.sector.id;
                    bad.J = cs.sector.spin();
                    bad.flag = describe(e);
                    out.push_back(bad);
                    ++failed;
                }
            }
        } catch (const Error& e) {
            SectorRun bad;
            bad.id = sector_id(cfg.model, lab);
            bad.flag = describe(e);
            out.push_back(bad);
            ++failed;
        }
    }
    return out;
}

inline ResultTable level_table(const RunConfig& cfg, const std::string& schema, const std::vector<Method>& methods) {
    ResultTable t;
    t.schema = schema;
    t.columns = {"sector", "J", "v", "method", "energy", "abs_error", "equidistant", "r_used", "delta1", "delta2", "flags"};
    t.config_echo = cfg.echo;
    int failed = 0;
    const auto runs = run_all(cfg, methods, failed);
    t.sectors_total = static_cast<int>(runs.size());
    t.sectors_failed = failed;
    for (const auto& run : runs) {
        if (!run.flag.empty()) {
            t.rows.push_back(RowBuilder(t).set("sector", run.id).set("J", run.J).flag("flags", run.flag).done());
            continue;
        }
        for (const auto& ls : run.methods) {
            if (ls.energies.empty()) {
                t.rows.push_back(RowBuilder(t)
                                     .set("sector", run.id)
                                     .set("J", run.J)
                                     .set("method", to_string(ls.method))
                                     .flag("flags", ls.flag)
                                     .done());
                continue;
            }
            for (std::size_t v = 0; v < ls.energies.size(); ++v) {
                RowBuilder b(t);
                b.set("sector", run.id).set("J", run.J).set("v", static_cast<double>(v)).set("method", to_string(ls.method));
                b.set("energy", ls.energies[v]);
                if (v < run.exact.size()) b.set("abs_error", std::abs(ls.energies[v] - run.exact[v]));
                if (v < run.equidistant.size()) b.set("equidistant", run.equidistant[v]);
                b.set("r_used", ls.r).set("delta1", ls.delta1).set("delta2", ls.delta2);
                if (v < ls.flags.size()) b.flag("flags", ls.flags[v]);
                b.flag("flags", ls.flag);
                t.rows.push_back(b.done());
            }
        }
    }
    return t;
}

} // namespace detail

inline ResultTable cmd_spectrum(const RunConfig& cfg) {
    return detail::level_table(cfg, "spectrum", detail::with_exact(cfg.method.methods));
}

// Every approximation against the exact spectrum unless methods were narrowed.
inline ResultTable cmd_compare(const RunConfig& cfg) {
    std::vector<Method> m = cfg.method.methods;
    if (m.size() == 1 && m[0] == Method::Exact) m = {Method::Cq, Method::Cmf, Method::Linear, Method::ClosedForm};
    return detail::level_table(cfg, "compare", detail::with_exact(m));
}

// One summary row per (sector, method): ground level, worst level error, deltas.
inline ResultTable cmd_sweep(const RunConfig& cfg) {
    using namespace detail;
    ResultTable t;
    t.schema = "sweep";
    t.columns = {"sector", "J", "method", "ground_energy", "max_abs_error", "r_used", "delta1", "delta2", "flags"};
    t.config_echo = cfg.echo;
    int failed = 0;
    const auto runs = run_all(cfg, with_exact(cfg.method.methods), failed);
    t.sectors_total = static_cast<int>(runs.size());
    t.sectors_failed = failed;
    for (const auto& run : runs) {
        if (!run.flag.empty()) {
            t.rows.push_back(RowBuilder(t).set("sector", run.id).set("J", run.J).flag("flags", run.flag).done());
            continue;
        }
        for (const auto& ls : run.methods) {
            RowBuilder b(t);
            b.set("sector", run.id).set("J", run.J).set("method", to_string(ls.method));
            if (!ls.energies.empty()) {
                b.set("ground_energy", ls.energies[0]);
                double worst = 0.0;
                bool any = false;
                for (std::size_t v = 0; v < ls.energies.size() && v < run.exact.size(); ++v) {
                    if (!std::isfinite(ls.energies[v])) continue;
                    worst = std::max(worst, std::abs(ls.energies[v] - run.exact[v]));
                    any = true;
                }
                if (any) b.set("max_abs_error", worst);
                for (const auto& f : ls.flags)
                    if (!f.empty()) {
                        b.flag("flags", "level " + f);
                        break;
                    }
            }
            b.set("r_used", ls.r).set("delta1", ls.delta1).set("delta2", ls.delta2).flag("flags", ls.flag);
            t.rows.push_back(b.done());
        }
    }
    return t;
}

namespace detail {

inline std::vector<double> split_numbers(const std::string& s, const std::string& what) {
    std::vector<double> out;
    std::istringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            std::size_t used = 0;
            const std::string t = trim(item);
            out.push_back(std::stod(t, &used));
            if (used != t.size()) throw std::invalid_argument(t);
        } catch (const std::logic_error&) {
            fail(ErrorKind::ValidationError, "malformed " + what + " '" + s + "'");
        }
    }
    return out;
}

inline std::pair<std::string, std::string> split_kind(const std::string& spec) {
    const auto c = spec.find(':');
    if (c == std::string::npos) return {spec, ""};
    return {spec.substr(0, c), spec.substr(c + 1)};
}

// Amplitudes in the original frame.
inline Eigen::VectorXcd initial_amplitudes(const RunConfig& cfg, const Sector& s) {
    const auto [kind, arg] = split_kind(cfg.dynamics.initial);
    const int dim = s.dim;
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
    if (kind == "basis") {
        const int k = arg.empty() ? 0 : static_cast<int>(split_numbers(arg, "basis index").at(0));
        if (k < 0 || k >= dim) fail(ErrorKind::InvalidArgument, "basis index out of range");
        psi(k) = 1.0;
    } else if (kind == "gcs") {
        const auto p = split_numbers(arg, "gcs parameters");
        if (p.empty()) fail(ErrorKind::ValidationError, "gcs needs r[,phase]");
        const double phase = p.size() > 1 ? p[1] : 0.0;
        const auto S = s.compact ? displacement_matrix(s.J, {p[0], 0.0, true}, dim)
                                 : displacement_matrix(s.J, {p[0], 0.0, false}, dim, 1);
        for (int f = 0; f < dim; ++f) psi(f) = S.entries(f, 0) * std::polar(1.0, f * phase);
    } else if (kind == "amps") {
        const auto a = split_numbers(arg, "amplitudes");
        if (static_cast<int>(a.size()) != dim) fail(ErrorKind::DimensionMismatch, "amplitude count differs from the sector size");
        for (int f = 0; f < dim; ++f) psi(f) = a[static_cast<std::size_t>(f)];
        if (std::abs(psi.norm() - 1.0) > 1e-10) fail(ErrorKind::InvalidArgument, "initial amplitudes must have norm 1");
    } else if (kind == "random") {
        std::mt19937_64 rng(cfg.seed);
        std::normal_distribution<double> nd;
        for (int f = 0; f < dim; ++f) psi(f) = {nd(rng), nd(rng)};
        psi.normalize();
    } else {
        fail(ErrorKind::ValidationError, "unknown initial state '" + cfg.dynamics.initial + "'");
    }
    return psi;
}

inline BlochState initial_bloch(const RunConfig& cfg, const Sector& s) {
    const auto [kind, arg] = split_kind(cfg.dynamics.initial);
    if (kind == "gcs" || (kind == "basis" && (arg.empty() || arg == "0"))) {
        const auto p = kind == "gcs" ? split_numbers(arg, "gcs parameters") : std::vector<double>{0.0};
        return bloch_from_gcs(s.J, p.at(0), p.size() > 1 ? p[1] : 0.0, s.compact);
    }
    if (kind == "bloch") {
        const auto y = split_numbers(arg, "bloch point");
        if (y.size() != 3) fail(ErrorKind::ValidationError, "bloch needs y1,y2,y0");
        return BlochState{{y[0], y[1], y[2]}, s.J, s.compact};
    }
    if (kind == "random") {
        std::mt19937_64 rng(cfg.seed);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const double r = s.compact ? 0.05 + 1.45 * u(rng) : 0.05 + 1.2 * u(rng);
        return bloch_from_gcs(s.J, r, std::numbers::pi * (2 * u(rng) - 1), s.compact);
    }
    fail(ErrorKind::ValidationError, "flow runs need a gcs, bloch or random initial point");
}

inline void flow_rows(const RunConfig& cfg, const CatalogSector& cs, ResultTable& t) {
    const Sector& s = cs.sector;
    const FlowModel fm(s, phi_from_psi(cs.psi, s), cfg.dynamics.variant);
    const auto tr = integrate(fm, initial_bloch(cfg, s), cfg.dynamics.t0, cfg.dynamics.t1, cfg.dynamics.samples,
                              cfg.dynamics.tol);
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        const auto& y = tr.states[i].y;
        t.rows.push_back(RowBuilder(t)
                             .set("sector", s.id)
                             .set("kind", "sample")
                             .set("time", tr.times[i])
                             .set("y1", y[0])
                             .set("y2", y[1])
                             .set("y0", y[2])
                             .set("energy", tr.energies[i])
                             .done());
    }
    t.rows.push_back(RowBuilder(t)
                         .set("sector", s.id)
                         .set("kind", "summary")
                         .set("casimir_drift", tr.casimir_drift)
                         .set("energy_drift", tr.energy_drift)
                         .flag("flags", tr.flag)
                         .done());
}

inline void quantum_rows(const RunConfig& cfg, const CatalogSector& cs, const SectorLabels& lab, ResultTable& t) {
    const Sector& s = cs.sector;
    const auto& d = cfg.dynamics;
    const auto sol = diagonalize(assemble_block(s, cs.psi));
    const Eigen::MatrixXd F = ladder_observable(cfg.model, lab, s, d.observable);
    const Eigen::VectorXcd psi = initial_amplitudes(cfg, s);
    std::vector<double> times(static_cast<std::size_t>(d.samples));
    for (int i = 0; i < d.samples; ++i) times[static_cast<std::size_t>(i)] = d.t0 + (d.t1 - d.t0) * i / (d.samples - 1);
    auto exact = [&](double tt) { return to_original_frame(exact_propagator(sol, tt), s.g_phase); };
    const auto ref = observable_series({{1.0, psi}}, F, times, exact, d.observable);
    std::vector<double> values = ref.values;
    std::vector<double> dev;
    double max_imag = ref.max_imag;
    if (d.source == "qa") {
        if (!s.compact) fail(ErrorKind::InvalidArgument, "qa propagator needs a compact sector");
        const auto vs = variational_spectrum(s, cs.psi, phi_from_psi(cs.psi, s), d.qa_method, cfg.method.policy);
        for (const auto& f : vs.level_flags)
            if (!f.empty()) fail(ErrorKind::NegativePhiArgument, "qa spectrum has undefined levels");
        const auto S = displacement_matrix(s.J, {vs.r_used, 0.0, true}, s.dim);
        auto qa = [&](double tt) { return to_original_frame(qa_propagator(vs.energies, S, tt), s.g_phase); };
        const auto ser = observable_series({{1.0, psi}}, F, times, qa, d.observable);
        values = ser.values;
        max_imag = std::max(max_imag, ser.max_imag);
        for (std::size_t i = 0; i < values.size(); ++i) dev.push_back(std::abs(values[i] - ref.values[i]));
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        RowBuilder b(t);
        b.set("sector", s.id).set("kind", "sample").set("time", times[i]).set("value", values[i]);
        if (!dev.empty()) {
            b.set("deviation", dev[i]);
            worst = std::max(worst, dev[i]);
        }
        t.rows.push_back(b.done());
    }
    RowBuilder b(t);
    b.set("sector", s.id).set("kind", "summary");
    if (!dev.empty()) b.set("deviation", worst);
    if (max_imag > 1e-10) b.flag("flags", "imaginary residue " + format_number(max_imag, 3));
    t.rows.push_back(b.done());
}

} // namespace detail

inline ResultTable cmd_dynamics(const RunConfig& cfg) {
    using namespace detail;
    ResultTable t;
    t.schema = "dynamics";
    t.columns = {"sector", "kind", "time", "value", "y1", "y2", "y0", "energy", "deviation", "casimir_drift", "energy_drift", "flags"};
    t.config_echo = cfg.echo;
    for (const auto& lab : cfg.jobs) {
        std::vector<CatalogSector> sectors;
        try {
            sectors = make_sectors(cfg.model, lab, cfg.method.truncation);
        } catch (const Error& e) {
            ++t.sectors_total;
            ++t.sectors_failed;
            t.rows.push_back(RowBuilder(t).set("sector", sector_id(cfg.model, lab)).set("kind", "summary").flag("flags", describe(e)).done());
            continue;
        }
        for (const auto& cs : sectors) {
            ++t.sectors_total;
            const std::size_t mark = t.rows.size();
            try {
                if (cfg.dynamics.mode == "flow") flow_rows(cfg, cs, t);
                else quantum_rows(cfg, cs, lab, t);
            } catch (const Error& e) {
                t.rows.resize(mark);
                ++t.sectors_failed;
                t.rows.push_back(RowBuilder(t).set("sector", cs.sector.id).set("kind", "summary").flag("flags", describe(e)).done());
            }
        }
    }
    return t;
}

// 0 when at least one sector succeeded, 3 when every requested sector failed.
inline int numeric_exit_code(const ResultTable& t) {
    return t.sectors_total > 0 && t.sectors_failed == t.sectors_total ? 3 : 0;
}

} // namespace sl2pd

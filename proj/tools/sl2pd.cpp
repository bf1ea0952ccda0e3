// sl2pd - spectra, variational comparisons, sweeps and dynamics for polynomial sl(2) models.

#include "sl2pd/commands.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

struct Overrides {
    std::string config;
    std::string format;
    std::string out;
    std::vector<std::string> methods;
    std::string root_policy;
    double tol{0.0};
    std::int64_t seed{-1};
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config, "configuration file (INI-like or JSON)")->required();
    cmd->add_option("--format", o.format, "output format")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--out", o.out, "output path, '-' for stdout");
    cmd->add_option("--method", o.methods, "methods: exact, cq, cmf, linear, closed_form")->delimiter(',');
    cmd->add_option("--root-policy", o.root_policy, "stationary root selection")
        ->check(CLI::IsMember({"min-delta2", "min-ground"}));
    cmd->add_option("--tol", o.tol, "solver tolerance")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", o.seed, "seed for random initial states")->check(CLI::NonNegativeNumber);
}

sl2pd::RunConfig load(const Overrides& o) {
    std::ifstream f(o.config, std::ios::binary);
    if (!f) sl2pd::fail(sl2pd::ErrorKind::IoError, "cannot read '" + o.config + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    sl2pd::RunConfig cfg = sl2pd::parse_config(ss.str());
    nlohmann::json e = cfg.echo;
    if (!o.format.empty()) e["output"]["format"] = o.format;
    if (!o.out.empty()) e["output"]["path"] = o.out;
    if (!o.methods.empty()) e["method"]["methods"] = o.methods;
    if (!o.root_policy.empty()) e["method"]["root_policy"] = o.root_policy;
    if (o.tol > 0.0) {
        e["method"]["tol"] = o.tol;
        e["dynamics"]["tol"] = o.tol;
    }
    if (o.seed >= 0) e["run"]["seed"] = o.seed;
    return sl2pd::config_from_json(e);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact and variational spectra and dynamics of polynomial sl(2) models"};
    app.require_subcommand(1);
    Overrides o;
    auto* spectrum = app.add_subcommand("spectrum", "exact and requested approximate spectra per sector");
    auto* dynamics = app.add_subcommand("dynamics", "quasiclassical flows or quantum observable series");
    auto* compare = app.add_subcommand("compare", "all approximations against the exact spectrum");
    auto* sweep = app.add_subcommand("sweep", "per-sector summary over label ranges");
    for (auto* c : {spectrum, dynamics, compare, sweep}) add_common(c, o);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    try {
        const sl2pd::RunConfig cfg = load(o);
        sl2pd::ResultTable t;
        if (spectrum->parsed()) t = sl2pd::cmd_spectrum(cfg);
        else if (dynamics->parsed()) t = sl2pd::cmd_dynamics(cfg);
        else if (compare->parsed()) t = sl2pd::cmd_compare(cfg);
        else t = sl2pd::cmd_sweep(cfg);
        sl2pd::write_output(t, cfg.output.format, cfg.output.path, cfg.output.precision);
        return sl2pd::numeric_exit_code(t);
    } catch (const sl2pd::Error& e) {
        std::cerr << "sl2pd: " << e.what() << '\n';
        switch (e.kind()) {
        case sl2pd::ErrorKind::ParseError:
        case sl2pd::ErrorKind::ValidationError:
        case sl2pd::ErrorKind::LabelMismatch:
        case sl2pd::ErrorKind::InvalidArgument: return 2;
        case sl2pd::ErrorKind::IoError: return 4;
        default: return 3;
        }
    }
}

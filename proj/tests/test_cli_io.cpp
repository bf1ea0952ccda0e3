#include "sl2pd/commands.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

using namespace sl2pd;

namespace {

const std::string dicke_ini = R"(
[model]
family = dicke
n = 1
n_atoms = 1
omegas = 1
epsilon = 1
g_prime = 0.3, 0

[sector]
kappa = 1..3
j = 1/2
)";

std::string with_block(const std::string& base, const std::string& block) { return base + "\n" + block + "\n"; }

ErrorKind kind_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error raised";
    return ErrorKind::InvalidArgument;
}

double num(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return *d;
    return std::numeric_limits<double>::quiet_NaN();
}

std::string text(const Cell& c) {
    if (const auto* s = std::get_if<std::string>(&c)) return *s;
    return "";
}

std::string to_csv(const ResultTable& t) {
    std::ostringstream os;
    write_csv(t, os);
    return os.str();
}

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
    auto p = std::filesystem::temp_directory_path() / name;
    std::ofstream(p, std::ios::binary) << content;
    return p;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(SL2PD_CLI) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

} // namespace

TEST(ParseConfig, MinimalDickeDefaults) {
    auto cfg = parse_config(dicke_ini);
    EXPECT_EQ(cfg.model.family, Family::Dicke);
    EXPECT_EQ(cfg.jobs.size(), 3u);
    EXPECT_EQ(cfg.jobs[0].j, Rational(1, 2));
    EXPECT_DOUBLE_EQ(cfg.method.tol, 1e-10);
    EXPECT_EQ(cfg.method.policy, RootPolicy::MinDelta2);
    EXPECT_EQ(cfg.output.precision, 17);
    EXPECT_EQ(cfg.echo["method"]["root_policy"], "min-delta2");
    EXPECT_EQ(cfg.echo["dynamics"]["tol"], 1e-10);
    ASSERT_TRUE(cfg.model.epsilon.exact.has_value());
}

TEST(ParseConfig, JsonAndIniAgree) {
    auto a = parse_config(dicke_ini);
    auto b = parse_config(R"({"model": {"family": "dicke", "n": 1, "n_atoms": 1, "omegas": [1], "epsilon": 1,
                                        "g_prime": [0.3, 0]},
                              "sector": {"kappa": "1..3", "j": "1/2"}})");
    ASSERT_EQ(a.jobs.size(), b.jobs.size());
    for (std::size_t i = 0; i < a.jobs.size(); ++i) {
        EXPECT_EQ(a.jobs[i].kappa, b.jobs[i].kappa);
        EXPECT_EQ(a.jobs[i].j, b.jobs[i].j);
    }
    EXPECT_EQ(a.model.g_prime, b.model.g_prime);
    EXPECT_EQ(cmd_spectrum(a).rows, cmd_spectrum(b).rows);
}

TEST(ParseConfig, PowerOrderViolation) {
    const std::string bad = "[model]\nfamily = two_mode\nm = 1\nn = 2\nomegas = 1, 2\ng_prime = 0.1\n";
    EXPECT_EQ(kind_of([&] { parse_config(bad); }), ErrorKind::ValidationError);
}

TEST(ParseConfig, UnknownKeyNamesLine) {
    const std::string bad = "[model]\nfamily = dicke\nfrobnicate = 3\n";
    try {
        parse_config(bad);
        FAIL() << "expected ParseError";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ParseError);
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("frobnicate"), std::string::npos);
    }
    EXPECT_EQ(kind_of([] { parse_config(R"({"model": {"family": "dicke"}, "extra": {}})"); }), ErrorKind::ParseError);
    EXPECT_EQ(kind_of([] { parse_config("{ not json"); }), ErrorKind::ParseError);
}

TEST(ParseConfig, SweepEnumeratesJobs) {
    auto cfg = parse_config(R"(
[model]
family = dicke
n_atoms = 1
omegas = 1
epsilon = 1
g_prime = 0.3
[sector]
kappa = 1..20
j = 1/2
)");
    EXPECT_EQ(cfg.jobs.size(), 20u);
}

TEST(ParseConfig, InitialStateSurvivesIniComma) {
    auto cfg = parse_config(with_block(dicke_ini, "[dynamics]\ninitial = gcs:0.5,0.25"));
    EXPECT_EQ(cfg.dynamics.initial, "gcs:0.5,0.25");
}

TEST(Spectrum, DickeExactAndCmf) {
    auto cfg = parse_config(with_block(dicke_ini, "[method]\nmethods = exact, cmf"));
    auto t = cmd_spectrum(cfg);
    ASSERT_EQ(t.rows.size(), 12u);
    const auto im = t.column("method"), ie = t.column("abs_error"), id = t.column("delta2");
    int cmf = 0;
    for (const auto& r : t.rows) {
        if (text(r[im]) != "cmf") continue;
        ++cmf;
        EXPECT_TRUE(std::isfinite(num(r[ie])));
        EXPECT_GT(num(r[id]), 0.0);
    }
    EXPECT_EQ(cmf, 6);
    EXPECT_EQ(numeric_exit_code(t), 0);
}

TEST(Spectrum, LinearSectorIsEquidistantInTable) {
    auto cfg = parse_config(R"({"model": {"family": "two_mode", "m": 1, "n": 1, "omegas": [1.3, 0.4], "g_prime": [0.7, 0.2]},
                                "sector": {"kappa": 0, "s": "1..6"}})");
    auto t = cmd_spectrum(cfg);
    const auto ie = t.column("energy"), iq = t.column("equidistant");
    ASSERT_FALSE(t.rows.empty());
    for (const auto& r : t.rows) EXPECT_NEAR(num(r[ie]), num(r[iq]), 1e-9);
}

TEST(Spectrum, ClosedFormOutsideCoveredSetIsFlagged) {
    auto cfg = parse_config(R"({"model": {"family": "two_mode", "m": 1, "n": 1, "omegas": [1.3, 0.4], "g_prime": [0.7, 0.2]},
                                "sector": {"kappa": 0, "s": 3}, "method": {"methods": ["closed_form"]}})");
    auto t = cmd_spectrum(cfg);
    const auto im = t.column("method"), ifl = t.column("flags");
    int flagged = 0;
    for (const auto& r : t.rows)
        if (text(r[im]) == "closed_form") {
            ++flagged;
            EXPECT_EQ(text(r[ifl]).rfind("UnsupportedClosedForm", 0), 0u);
        }
    EXPECT_EQ(flagged, 1);
}

TEST(Spectrum, NoncompactSectorsUseTruncation) {
    auto cfg = parse_config(R"({"model": {"family": "two_mode", "m": 2, "n": 0, "omegas": [1, 1], "g_prime": [0.2, 0.1]},
                                "sector": {"kappa": 0}, "method": {"methods": ["exact", "cmf"], "levels": 3}})");
    auto t = cmd_spectrum(cfg);
    const auto ie = t.column("energy"), iq = t.column("equidistant"), im = t.column("method");
    int exact = 0;
    for (const auto& r : t.rows)
        if (text(r[im]) == "exact") {
            ++exact;
            EXPECT_NEAR(num(r[ie]), num(r[iq]), 1e-9);
        }
    EXPECT_EQ(exact, 3);
}

TEST(Sweep, IsolationAndSummary) {
    auto cfg = parse_config(with_block(dicke_ini, "[method]\nmethods = cq"));
    const auto good = cmd_sweep(cfg);
    EXPECT_EQ(good.rows.size(), 6u);
    auto mixed = cfg;
    mixed.jobs.insert(mixed.jobs.begin() + 1, SectorLabels{2, 0, {}, Rational(5)});
    const auto t = cmd_sweep(mixed);
    ASSERT_EQ(t.rows.size(), good.rows.size() + 1);
    EXPECT_EQ(text(t.rows[2][t.column("flags")]).rfind("LabelMismatch", 0), 0u);
    std::vector<std::vector<Cell>> rest = t.rows;
    rest.erase(rest.begin() + 2);
    EXPECT_EQ(rest, good.rows);
    EXPECT_EQ(t.sectors_failed, 1);
    EXPECT_EQ(numeric_exit_code(t), 0);
}

TEST(Sweep, AllSectorsFailing) {
    auto cfg = parse_config(with_block(dicke_ini, ""));
    for (auto& j : cfg.jobs) j.j = Rational(3);
    auto t = cmd_sweep(cfg);
    EXPECT_EQ(t.rows.size(), 3u);
    EXPECT_EQ(numeric_exit_code(t), 3);
}

TEST(Dynamics, PrecessionDrift) {
    auto cfg = parse_config(R"(
[model]
family = dicke
n_atoms = 4
omegas = 1
epsilon = 1.6
g_prime = 0
[sector]
kappa = 3
j = 2
[dynamics]
mode = flow
variant = cq
initial = gcs:0.6,0.1
t1 = 50
samples = 11
)");
    auto t = cmd_dynamics(cfg);
    const auto& last = t.rows.back();
    EXPECT_EQ(text(last[t.column("kind")]), "summary");
    EXPECT_LT(num(last[t.column("casimir_drift")]), 1e-8);
    EXPECT_LT(num(last[t.column("energy_drift")]), 1e-8);
}

TEST(Dynamics, RabiSeries) {
    auto cfg = parse_config(with_block(dicke_ini, "[dynamics]\nobservable = inversion\nt1 = 20\nsamples = 41"));
    cfg.jobs.resize(1);
    auto t = cmd_dynamics(cfg);
    ASSERT_EQ(t.rows.size(), 42u);
    for (std::size_t i = 0; i + 1 < t.rows.size(); ++i) {
        const double tt = num(t.rows[i][t.column("time")]);
        EXPECT_NEAR(num(t.rows[i][t.column("value")]), -std::cos(2 * 0.3 * tt), 1e-8);
    }
}

TEST(Dynamics, QaMatchesExactOnLinearSector) {
    auto cfg = parse_config(R"({"model": {"family": "two_mode", "m": 1, "n": 1, "omegas": [1.3, 0.4], "g_prime": [0.7, 0.2]},
                                "sector": {"kappa": 0, "s": 5},
                                "dynamics": {"source": "qa", "initial": "gcs:0.3,0.7", "observable": "n1", "t1": 140, "samples": 20}})");
    auto t = cmd_dynamics(cfg);
    const auto& last = t.rows.back();
    EXPECT_TRUE(text(last[t.column("flags")]).empty());
    EXPECT_LT(num(last[t.column("deviation")]), 1e-8);
}

TEST(Dynamics, RandomInitialStateUsesSeed) {
    auto cfg = parse_config(with_block(dicke_ini, "[dynamics]\ninitial = random\nsamples = 3\n[run]\nseed = 7"));
    auto a = cmd_dynamics(cfg);
    auto b = cmd_dynamics(cfg);
    EXPECT_EQ(a.rows, b.rows);
    cfg.seed = 8;
    EXPECT_NE(cmd_dynamics(cfg).rows, a.rows);
}

TEST(Output, EmptyTableIsHeaderOnly) {
    ResultTable t;
    t.columns = {"a", "b"};
    EXPECT_EQ(to_csv(t), "a,b\n");
}

TEST(Output, NonFiniteNeverInNumericColumns) {
    ResultTable t;
    t.columns = {"x", "flags"};
    t.rows.push_back(RowBuilder(t).set("x", std::numeric_limits<double>::quiet_NaN()).flag("flags", "NegativePhiArgument").done());
    const std::string csv = to_csv(t);
    EXPECT_EQ(csv, "x,flags\n,NegativePhiArgument\n");
    EXPECT_TRUE(table_to_json(t)["rows"][0]["x"].is_null());
}

TEST(Output, JsonRoundTrip) {
    auto cfg = parse_config(with_block(dicke_ini, "[method]\nmethods = cq, cmf, closed_form"));
    auto t = cmd_compare(cfg);
    std::ostringstream os;
    write_json(t, os);
    auto back = table_from_json(nlohmann::json::parse(os.str()));
    EXPECT_TRUE(back == t);
    const auto j = nlohmann::json::parse(os.str());
    EXPECT_TRUE(j.contains("schema") && j.contains("config_echo") && j.contains("rows"));
}

TEST(Output, DeterministicBytesAndIoError) {
    auto cfg = parse_config(dicke_ini);
    auto p1 = std::filesystem::temp_directory_path() / "sl2pd_det_1.csv";
    auto p2 = std::filesystem::temp_directory_path() / "sl2pd_det_2.csv";
    write_output(cmd_spectrum(parse_config(dicke_ini)), "csv", p1.string());
    write_output(cmd_spectrum(cfg), "csv", p2.string());
    std::ifstream a(p1, std::ios::binary), b(p2, std::ios::binary);
    std::string sa((std::istreambuf_iterator<char>(a)), {}), sb((std::istreambuf_iterator<char>(b)), {});
    EXPECT_EQ(sa, sb);
    EXPECT_EQ(sa.find('\r'), std::string::npos);
    EXPECT_EQ(kind_of([&] { write_output(cmd_spectrum(cfg), "csv", "/nonexistent/dir/out.csv"); }), ErrorKind::IoError);
}

TEST(Cli, ExitCodes) {
    const auto good = temp_file("sl2pd_good.ini", dicke_ini);
    const auto bad = temp_file("sl2pd_bad.ini", "[model]\nfamily = two_mode\nm = 1\nn = 2\nomegas = 1, 1\ng_prime = 0.1\n");
    const auto dead = temp_file("sl2pd_dead.ini", "[model]\nfamily = dicke\nn_atoms = 1\nomegas = 1\nepsilon = 1\n"
                                                  "g_prime = 0.3\n[sector]\nkappa = 1..2\nj = 3\n");
    EXPECT_EQ(run_cli("spectrum --config " + good.string()), 0);
    EXPECT_EQ(run_cli("sweep --config " + good.string() + " --method cq,cmf --format json"), 0);
    EXPECT_EQ(run_cli("spectrum --config " + bad.string()), 2);
    EXPECT_EQ(run_cli("spectrum --config " + dead.string()), 3);
    EXPECT_EQ(run_cli("spectrum --config " + good.string() + " --out /nonexistent/dir/x.csv"), 4);
    EXPECT_EQ(run_cli("spectrum --config /nonexistent/config.ini"), 4);
}

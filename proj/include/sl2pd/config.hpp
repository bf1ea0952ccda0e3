// config.hpp - Run configuration: INI-like or JSON text mapped onto one validated RunConfig.

#pragma once

#include "sl2pd/catalog.hpp"
#include "sl2pd/dynamics.hpp"
#include "sl2pd/errors.hpp"
#include "sl2pd/variational.hpp"

#include "json.hpp"

#include <cctype>
#include <charconv>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace sl2pd {

using json = nlohmann::json;

struct MethodConfig {
    std::vector<Method> methods{Method::Exact};
    RootPolicy policy{RootPolicy::MinDelta2};
    double tol{1e-10};
    int truncation{64};
    int ceiling{1 << 16};
    int levels{4};  // lowest levels reported for noncompact sectors
};

struct DynamicsConfig {
    std::string mode{"quantum"};  // quantum | flow
    FlowVariant variant{FlowVariant::Cmf};
    std::string source{"exact"};  // exact | qa
    Method qa_method{Method::Cq};
    std::string initial{"basis:0"};
    std::string observable{"V0"};
    double t0{0.0};
    double t1{10.0};
    int samples{101};
    double tol{1e-10};
};

struct OutputConfig {
    std::string format{"csv"};
    std::string path{"-"};
    int precision{17};
};

struct RunConfig {
    ModelSpec model;
    std::vector<SectorLabels> jobs;
    MethodConfig method;
    DynamicsConfig dynamics;
    OutputConfig output;
    std::uint64_t seed{0};
    json echo;  // resolved configuration, all defaults filled
};

namespace detail {

// Allowed keys per block; anything else is rejected.
inline const std::map<std::string, std::set<std::string>>& config_schema() {
    static const std::map<std::string, std::set<std::string>> s{
        {"model", {"family", "m", "n", "n_atoms", "omegas", "omega0", "epsilon", "g_prime", "psi", "l0", "J", "compact",
                   "dim", "a", "c_shift"}},
        {"sector", {"kappa", "s", "kappas", "j"}},
        {"method", {"methods", "root_policy", "tol", "truncation", "ceiling", "levels"}},
        {"dynamics", {"mode", "variant", "source", "qa_method", "initial", "observable", "t0", "t1", "samples", "tol"}},
        {"output", {"format", "path", "precision"}},
        {"run", {"seed"}},
    };
    return s;
}

inline std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

inline json ini_scalar(const std::string& text) {
    const std::string t = trim(text);
    if (t.empty()) return json(t);
    long long i = 0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), i);
    if (ec == std::errc() && p == t.data() + t.size()) return json(i);
    double d = 0.0;
    auto [q, ec2] = std::from_chars(t.data(), t.data() + t.size(), d);
    if (ec2 == std::errc() && q == t.data() + t.size()) return json(d);
    if (t == "true") return json(true);
    if (t == "false") return json(false);
    return json(t);
}

inline json parse_ini(const std::string& text) {
    json root = json::object();
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    const auto& schema = config_schema();
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        const std::string where = "line " + std::to_string(lineno) + ": ";
        if (t.front() == '[') {
            if (t.back() != ']') fail(ErrorKind::ParseError, where + "unterminated section header");
            section = trim(std::string_view(t).substr(1, t.size() - 2));
            if (!schema.count(section)) fail(ErrorKind::ParseError, where + "unknown section [" + section + "]");
            if (root.contains(section)) fail(ErrorKind::ParseError, where + "duplicate section [" + section + "]");
            root[section] = json::object();
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) fail(ErrorKind::ParseError, where + "expected key = value");
        if (section.empty()) fail(ErrorKind::ParseError, where + "key outside of a section");
        const std::string key = trim(std::string_view(t).substr(0, eq));
        const std::string val = trim(std::string_view(t).substr(eq + 1));
        if (!schema.at(section).count(key))
            fail(ErrorKind::ParseError, where + "unknown key '" + key + "' in [" + section + "]");
        if (root[section].contains(key)) fail(ErrorKind::ParseError, where + "duplicate key '" + key + "'");
        if (val.find(',') != std::string::npos) {
            json arr = json::array();
            std::istringstream parts(val);
            std::string item;
            while (std::getline(parts, item, ',')) arr.push_back(ini_scalar(item));
            root[section][key] = arr;
        } else {
            root[section][key] = ini_scalar(val);
        }
    }
    return root;
}

inline void check_keys(const json& root) {
    if (!root.is_object()) fail(ErrorKind::ParseError, "configuration must be an object");
    const auto& schema = config_schema();
    for (const auto& [block, body] : root.items()) {
        if (!schema.count(block)) fail(ErrorKind::ParseError, "unknown block '" + block + "'");
        if (!body.is_object()) fail(ErrorKind::ParseError, "block '" + block + "' must be an object");
        for (const auto& [key, v] : body.items()) {
            (void)v;
            if (!schema.at(block).count(key)) fail(ErrorKind::ParseError, "unknown key '" + block + "." + key + "'");
        }
    }
}

inline Rational parse_rational(const json& v, const std::string& key) {
    auto bad = [&]() -> Rational { fail(ErrorKind::ParseError, "key '" + key + "': expected a rational number"); };
    if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
    if (v.is_number_float()) {
        const double d = v.get<double>();
        for (std::int64_t den : {1, 2, 3, 4, 6, 8, 12}) {
            const double num = d * static_cast<double>(den);
            if (std::abs(num - std::round(num)) < 1e-12) return Rational(static_cast<std::int64_t>(std::llround(num)), den);
        }
        return bad();
    }
    if (!v.is_string()) return bad();
    const std::string s = trim(v.get<std::string>());
    const auto slash = s.find('/');
    try {
        std::size_t used = 0;
        if (slash == std::string::npos) {
            const long long n = std::stoll(s, &used);
            if (used != s.size()) return bad();
            return Rational(n);
        }
        const std::string a = s.substr(0, slash), b = s.substr(slash + 1);
        std::size_t ua = 0, ub = 0;
        const long long n = std::stoll(a, &ua), d = std::stoll(b, &ub);
        if (ua != a.size() || ub != b.size() || d == 0) return bad();
        return Rational(n, d);
    } catch (const std::logic_error&) {
        return bad();
    }
}

// Exact when the text is an integer or p/q, floating otherwise.
inline Scalar parse_scalar(const json& v, const std::string& key) {
    if (v.is_number_float()) return Scalar(v.get<double>());
    return Scalar(parse_rational(v, key));
}

inline std::vector<json> as_list(const json& v) {
    if (v.is_array()) return std::vector<json>(v.begin(), v.end());
    return {v};
}

inline double get_double(const json& v, const std::string& key) {
    if (!v.is_number()) fail(ErrorKind::ParseError, "key '" + key + "': expected a number");
    return v.get<double>();
}

inline int get_int(const json& v, const std::string& key) {
    if (!v.is_number_integer()) fail(ErrorKind::ParseError, "key '" + key + "': expected an integer");
    return v.get<int>();
}

inline std::string get_string(const json& v, const std::string& key) {
    if (!v.is_string()) fail(ErrorKind::ParseError, "key '" + key + "': expected a string");
    return v.get<std::string>();
}

// Inclusive integer range from "a..b" or a plain integer.
inline std::pair<int, int> int_range(const json& v, const std::string& key) {
    if (v.is_number_integer()) return {v.get<int>(), v.get<int>()};
    const std::string s = get_string(v, key);
    const auto dots = s.find("..");
    if (dots == std::string::npos) fail(ErrorKind::ParseError, "key '" + key + "': expected an integer or a..b");
    try {
        const int a = std::stoi(s.substr(0, dots)), b = std::stoi(s.substr(dots + 2));
        if (b < a) fail(ErrorKind::ValidationError, "key '" + key + "': empty range " + s);
        return {a, b};
    } catch (const std::logic_error&) {
        fail(ErrorKind::ParseError, "key '" + key + "': malformed range " + s);
    }
}

inline std::pair<Rational, Rational> rational_range(const json& v, const std::string& key) {
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        const auto dots = s.find("..");
        if (dots != std::string::npos)
            return {parse_rational(json(s.substr(0, dots)), key), parse_rational(json(s.substr(dots + 2)), key)};
    }
    const Rational q = parse_rational(v, key);
    return {q, q};
}

inline Family parse_family(const std::string& s) {
    if (s == "two_mode") return Family::TwoMode;
    if (s == "multimode") return Family::Multimode;
    if (s == "dicke") return Family::Dicke;
    if (s == "custom") return Family::Custom;
    fail(ErrorKind::ValidationError, "unknown family '" + s + "'");
}

} // namespace detail

inline Method parse_method(const std::string& s) {
    if (s == "exact") return Method::Exact;
    if (s == "cq") return Method::Cq;
    if (s == "cmf") return Method::Cmf;
    if (s == "linear") return Method::Linear;
    if (s == "closed_form") return Method::ClosedForm;
    fail(ErrorKind::ValidationError, "unknown method '" + s + "'");
}

inline RootPolicy parse_root_policy(const std::string& s) {
    if (s == "min-delta2") return RootPolicy::MinDelta2;
    if (s == "min-ground") return RootPolicy::MinGround;
    fail(ErrorKind::ValidationError, "unknown root policy '" + s + "'");
}

inline FlowVariant parse_variant(const std::string& s) {
    if (s == "cq") return FlowVariant::Cq;
    if (s == "cmf") return FlowVariant::Cmf;
    if (s == "linear") return FlowVariant::Linear;
    fail(ErrorKind::ValidationError, "unknown flow variant '" + s + "'");
}

// Re-derives every RunConfig field from the (possibly overridden) echo document.
inline RunConfig config_from_json(const json& root) {
    using namespace detail;
    check_keys(root);
    if (!root.contains("model")) fail(ErrorKind::ValidationError, "missing [model] block");
    RunConfig cfg;
    const json& m = root.at("model");
    auto need = [&](const json& block, const std::string& b, const std::string& key) -> const json& {
        if (!block.contains(key)) fail(ErrorKind::ValidationError, "missing key '" + b + "." + key + "'");
        return block.at(key);
    };
    ModelSpec& ms = cfg.model;
    ms.family = parse_family(get_string(need(m, "model", "family"), "model.family"));
    if (ms.family == Family::Custom) {
        CustomBundle cb;
        std::vector<double> c;
        for (const auto& x : as_list(need(m, "model", "psi"))) c.push_back(get_double(x, "model.psi"));
        cb.psi = StructurePolynomial(Polynomial(c));
        cb.l0 = parse_rational(need(m, "model", "l0"), "model.l0");
        cb.J = parse_rational(need(m, "model", "J"), "model.J");
        cb.compact = m.value("compact", true);
        cb.dim = m.contains("dim") ? get_int(m.at("dim"), "model.dim")
                                   : static_cast<int>((cb.J * Rational(2)).numerator() / (cb.J * Rational(2)).denominator()) + 1;
        cb.a = get_double(need(m, "model", "a"), "model.a");
        const auto g = as_list(need(m, "model", "g_prime"));
        cb.g = {get_double(g.at(0), "model.g_prime"), g.size() > 1 ? get_double(g.at(1), "model.g_prime") : 0.0};
        cb.c_shift = m.contains("c_shift") ? get_double(m.at("c_shift"), "model.c_shift") : 0.0;
        ms.custom = cb;
    } else {
        if (m.contains("m")) ms.m = get_int(m.at("m"), "model.m");
        if (m.contains("n")) ms.n = get_int(m.at("n"), "model.n");
        if (m.contains("n_atoms")) ms.n_atoms = get_int(m.at("n_atoms"), "model.n_atoms");
        for (const auto& x : as_list(need(m, "model", "omegas"))) ms.omegas.push_back(parse_scalar(x, "model.omegas"));
        if (m.contains("omega0")) ms.omega0 = parse_scalar(m.at("omega0"), "model.omega0");
        if (m.contains("epsilon")) ms.epsilon = parse_scalar(m.at("epsilon"), "model.epsilon");
        const auto g = as_list(need(m, "model", "g_prime"));
        if (g.empty() || g.size() > 2) fail(ErrorKind::ValidationError, "model.g_prime must be [re] or [re, im]");
        ms.g_prime = {get_double(g[0], "model.g_prime"), g.size() > 1 ? get_double(g[1], "model.g_prime") : 0.0};
    }
    validate_model(ms);

    // sector jobs
    const json sec = root.value("sector", json::object());
    switch (ms.family) {
    case Family::TwoMode: {
        const auto k = int_range(sec.contains("kappa") ? sec.at("kappa") : json(0), "sector.kappa");
        const auto s = int_range(sec.contains("s") ? sec.at("s") : json(0), "sector.s");
        for (int a = k.first; a <= k.second; ++a)
            for (int b = s.first; b <= s.second; ++b) cfg.jobs.push_back({a, b, {}, Rational(0)});
        break;
    }
    case Family::Multimode: {
        std::vector<int> ks;
        for (const auto& x : as_list(need(sec, "sector", "kappas"))) ks.push_back(get_int(x, "sector.kappas"));
        const auto s = int_range(need(sec, "sector", "s"), "sector.s");
        for (int b = s.first; b <= s.second; ++b) cfg.jobs.push_back({0, b, ks, Rational(0)});
        break;
    }
    case Family::Dicke: {
        const auto k = int_range(need(sec, "sector", "kappa"), "sector.kappa");
        const auto j = rational_range(need(sec, "sector", "j"), "sector.j");
        const bool range = j.first != j.second;
        for (int a = k.first; a <= k.second; ++a)
            for (Rational q = j.first; q <= j.second; q += Rational(1)) {
                // ranges skip spins of the wrong parity for this atom number
                const Rational twoj = q * Rational(2);
                if (range && (!is_integer(twoj) || (twoj.numerator() - ms.n_atoms) % 2 != 0)) continue;
                cfg.jobs.push_back({a, 0, {}, q});
            }
        break;
    }
    case Family::Custom: cfg.jobs.push_back({}); break;
    }
    if (cfg.jobs.empty()) fail(ErrorKind::ValidationError, "sector block selects no sectors");

    const json me = root.value("method", json::object());
    if (me.contains("methods")) {
        cfg.method.methods.clear();
        for (const auto& x : as_list(me.at("methods"))) cfg.method.methods.push_back(parse_method(get_string(x, "method.methods")));
    }
    if (me.contains("root_policy")) cfg.method.policy = parse_root_policy(get_string(me.at("root_policy"), "method.root_policy"));
    if (me.contains("tol")) cfg.method.tol = get_double(me.at("tol"), "method.tol");
    if (me.contains("truncation")) cfg.method.truncation = get_int(me.at("truncation"), "method.truncation");
    if (me.contains("ceiling")) cfg.method.ceiling = get_int(me.at("ceiling"), "method.ceiling");
    if (me.contains("levels")) cfg.method.levels = get_int(me.at("levels"), "method.levels");
    if (!(cfg.method.tol > 0.0)) fail(ErrorKind::ValidationError, "method.tol must be positive");
    if (cfg.method.truncation < 2 || cfg.method.levels < 1 || cfg.method.ceiling < cfg.method.truncation)
        fail(ErrorKind::ValidationError, "need truncation >= 2, levels >= 1 and ceiling >= truncation");

    const json dy = root.value("dynamics", json::object());
    DynamicsConfig& d = cfg.dynamics;
    if (dy.contains("mode")) d.mode = get_string(dy.at("mode"), "dynamics.mode");
    if (dy.contains("variant")) d.variant = parse_variant(get_string(dy.at("variant"), "dynamics.variant"));
    if (dy.contains("source")) d.source = get_string(dy.at("source"), "dynamics.source");
    if (dy.contains("qa_method")) d.qa_method = parse_method(get_string(dy.at("qa_method"), "dynamics.qa_method"));
    if (dy.contains("initial")) {
        // a list of numbers is an explicit amplitude vector
        const json& iv = dy.at("initial");
        const bool numeric = iv.is_array() && std::all_of(iv.begin(), iv.end(), [](const json& x) { return x.is_number(); });
        if (iv.is_array() && !numeric) {
            // INI splits "gcs:r,phase" at the comma; glue it back
            std::string s;
            for (std::size_t i = 0; i < iv.size(); ++i) {
                std::ostringstream os;
                os.precision(17);
                if (iv[i].is_string()) os << iv[i].get<std::string>();
                else os << iv[i].get<double>();
                s += (i ? "," : "") + os.str();
            }
            d.initial = s;
        } else if (numeric) {
            std::string s = "amps:";
            for (std::size_t i = 0; i < iv.size(); ++i) {
                std::ostringstream os;
                os.precision(17);
                os << get_double(iv[i], "dynamics.initial");
                s += (i ? "," : "") + os.str();
            }
            d.initial = s;
        } else {
            d.initial = get_string(iv, "dynamics.initial");
        }
    }
    if (dy.contains("observable")) d.observable = get_string(dy.at("observable"), "dynamics.observable");
    if (dy.contains("t0")) d.t0 = get_double(dy.at("t0"), "dynamics.t0");
    if (dy.contains("t1")) d.t1 = get_double(dy.at("t1"), "dynamics.t1");
    if (dy.contains("samples")) d.samples = get_int(dy.at("samples"), "dynamics.samples");
    if (dy.contains("tol")) d.tol = get_double(dy.at("tol"), "dynamics.tol");
    if (d.mode != "quantum" && d.mode != "flow") fail(ErrorKind::ValidationError, "dynamics.mode must be quantum or flow");
    if (d.source != "exact" && d.source != "qa") fail(ErrorKind::ValidationError, "dynamics.source must be exact or qa");
    if (d.qa_method != Method::Cq && d.qa_method != Method::Cmf && d.qa_method != Method::Linear)
        fail(ErrorKind::ValidationError, "dynamics.qa_method must be cq, cmf or linear");
    if (d.samples < 2 || !(d.t1 > d.t0) || !(d.tol > 0.0))
        fail(ErrorKind::ValidationError, "dynamics needs samples >= 2, t1 > t0 and tol > 0");

    const json out = root.value("output", json::object());
    if (out.contains("format")) cfg.output.format = get_string(out.at("format"), "output.format");
    if (out.contains("path")) cfg.output.path = get_string(out.at("path"), "output.path");
    if (out.contains("precision")) cfg.output.precision = get_int(out.at("precision"), "output.precision");
    if (cfg.output.format != "csv" && cfg.output.format != "json")
        fail(ErrorKind::ValidationError, "output.format must be csv or json");
    if (cfg.output.precision < 1 || cfg.output.precision > 17)
        fail(ErrorKind::ValidationError, "output.precision must lie in 1..17");
    const json run = root.value("run", json::object());
    if (run.contains("seed")) cfg.seed = run.at("seed").get<std::uint64_t>();

    // resolved echo
    json e = root;
    json methods = json::array();
    for (Method x : cfg.method.methods) methods.push_back(to_string(x));
    e["method"] = {{"methods", methods},
                   {"root_policy", to_string(cfg.method.policy)},
                   {"tol", cfg.method.tol},
                   {"truncation", cfg.method.truncation},
                   {"ceiling", cfg.method.ceiling},
                   {"levels", cfg.method.levels}};
    e["dynamics"] = {{"mode", d.mode},         {"variant", to_string(d.variant)}, {"source", d.source},
                     {"qa_method", to_string(d.qa_method)}, {"initial", d.initial}, {"observable", d.observable},
                     {"t0", d.t0},             {"t1", d.t1},                      {"samples", d.samples},
                     {"tol", d.tol}};
    e["output"] = {{"format", cfg.output.format}, {"path", cfg.output.path}, {"precision", cfg.output.precision}};
    e["run"] = {{"seed", cfg.seed}};
    if (!e.contains("sector")) e["sector"] = json::object();
    cfg.echo = e;
    return cfg;
}

// JSON when the first non-blank character is '{', INI-like sections otherwise.
inline RunConfig parse_config(const std::string& text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    json root;
    if (first != std::string::npos && text[first] == '{') {
        try {
            root = json::parse(text);
        } catch (const json::parse_error& e) {
            fail(ErrorKind::ParseError, std::string("JSON: ") + e.what());
        }
    } else {
        root = detail::parse_ini(text);
    }
    try {
        return config_from_json(root);
    } catch (const json::exception& e) {
        fail(ErrorKind::ParseError, e.what());
    }
}

} // namespace sl2pd

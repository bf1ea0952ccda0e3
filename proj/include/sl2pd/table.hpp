// table.hpp - Result tables and their CSV/JSON serialization.

#pragma once

#include "sl2pd/errors.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace sl2pd {

// Empty, numeric or text cell. Non-finite numbers never reach a numeric column.
using Cell = std::variant<std::monostate, double, std::string>;

struct ResultTable {
    std::string schema;  // command name; fixes the column set
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    nlohmann::json config_echo = nlohmann::json::object();
    int sectors_total{0};
    int sectors_failed{0};

    std::size_t column(const std::string& name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return i;
        fail(ErrorKind::InvalidArgument, "no column '" + name + "'");
    }
};

inline bool operator==(const ResultTable& a, const ResultTable& b) {
    return a.schema == b.schema && a.columns == b.columns && a.rows == b.rows && a.config_echo == b.config_echo;
}

// Row builder keyed by column name; unset cells stay empty.
class RowBuilder {
public:
    explicit RowBuilder(const ResultTable& t) : t_(t), row_(t.columns.size()) {}

    RowBuilder& set(const std::string& col, double v) {
        if (std::isfinite(v)) row_[t_.column(col)] = v;
        return *this;
    }
    RowBuilder& set(const std::string& col, const std::string& v) {
        row_[t_.column(col)] = v;
        return *this;
    }
    RowBuilder& set(const std::string& col, const char* v) { return set(col, std::string(v)); }
    // appends to a ';'-separated text cell
    RowBuilder& flag(const std::string& col, const std::string& v) {
        if (v.empty()) return *this;
        auto& c = row_[t_.column(col)];
        if (auto* s = std::get_if<std::string>(&c); s && !s->empty()) *s += ";" + v;
        else c = v;
        return *this;
    }
    std::vector<Cell> done() { return std::move(row_); }

private:
    const ResultTable& t_;
    std::vector<Cell> row_;
};

inline std::string format_number(double v, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    return buf;
}

namespace detail {

inline std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

} // namespace detail

inline void write_csv(const ResultTable& t, std::ostream& os, int precision = 17) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << detail::csv_quote(t.columns[i]);
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) os << ',';
            if (const auto* d = std::get_if<double>(&row[i])) os << format_number(*d, precision);
            else if (const auto* s = std::get_if<std::string>(&row[i])) os << detail::csv_quote(*s);
        }
        os << '\n';
    }
}

inline nlohmann::json table_to_json(const ResultTable& t, int precision = 17) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : t.rows) {
        nlohmann::json r = nlohmann::json::object();
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (const auto* d = std::get_if<double>(&row[i])) r[t.columns[i]] = std::strtod(format_number(*d, precision).c_str(), nullptr);
            else if (const auto* s = std::get_if<std::string>(&row[i])) r[t.columns[i]] = *s;
            else r[t.columns[i]] = nullptr;
        }
        rows.push_back(std::move(r));
    }
    return {{"schema", {{"command", t.schema}, {"columns", t.columns}}}, {"config_echo", t.config_echo}, {"rows", rows}};
}

inline void write_json(const ResultTable& t, std::ostream& os, int precision = 17) {
    os << table_to_json(t, precision).dump(2) << '\n';
}

inline ResultTable table_from_json(const nlohmann::json& j) {
    ResultTable t;
    try {
        t.schema = j.at("schema").at("command").get<std::string>();
        t.columns = j.at("schema").at("columns").get<std::vector<std::string>>();
        t.config_echo = j.at("config_echo");
        for (const auto& r : j.at("rows")) {
            std::vector<Cell> row(t.columns.size());
            for (std::size_t i = 0; i < t.columns.size(); ++i) {
                const auto& v = r.at(t.columns[i]);
                if (v.is_number()) row[i] = v.get<double>();
                else if (v.is_string()) row[i] = v.get<std::string>();
            }
            t.rows.push_back(std::move(row));
        }
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::ParseError, std::string("result table: ") + e.what());
    }
    return t;
}

// path "-" writes to stdout.
inline void write_output(const ResultTable& t, const std::string& format, const std::string& path, int precision = 17) {
    auto emit = [&](std::ostream& os) {
        if (format == "csv") write_csv(t, os, precision);
        else if (format == "json") write_json(t, os, precision);
        else fail(ErrorKind::InvalidArgument, "unknown format '" + format + "'");
    };
    if (path == "-") {
        emit(std::cout);
        std::cout.flush();
        if (!std::cout) fail(ErrorKind::IoError, "cannot write to stdout");
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) fail(ErrorKind::IoError, "cannot open '" + path + "' for writing");
    emit(f);
    f.close();
    if (!f) fail(ErrorKind::IoError, "write to '" + path + "' failed");
}

} // namespace sl2pd

#include "tool_config.hpp"

#include "proxtrace/error.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace proxtrace::tools {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

double num(const std::string& key, const std::string& v) {
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out)) {
        raise(errc::config_invalid, key + " expects a number, got '" + v + "'");
    }
    return out;
}

std::size_t unum(const std::string& key, const std::string& v) {
    std::size_t out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        raise(errc::config_invalid, key + " expects a non-negative integer, got '" + v + "'");
    }
    return out;
}

ingest::WindowSpec parse_window(const std::string& v) {
    if (v == "per-sample") {
        return ingest::WindowSpec::per_sample();
    }
    if (v.rfind("time:", 0) == 0) {
        const double s = num("window", v.substr(5));
        if (s <= 0.0) raise(errc::config_invalid, "window time must be positive");
        return ingest::WindowSpec::by_time(s);
    }
    if (v.rfind("count:", 0) == 0) {
        const std::size_t n = unum("window", v.substr(6));
        if (n == 0) raise(errc::config_invalid, "window count must be positive");
        return ingest::WindowSpec::by_count(n);
    }
    raise(errc::config_invalid, "window must be per-sample, time:<s> or count:<n>");
}

} // namespace

ToolConfig parse_tool_config(std::istream& in) {
    ToolConfig cfg;
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (auto hash = raw.find('#'); hash != std::string::npos) {
            raw.erase(hash);
        }
        const std::string line = trim(raw);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            std::ostringstream os;
            os << "config line " << line_no << ": expected 'key = value'";
            raise(errc::config_invalid, os.str());
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "max_depth") {
            cfg.tree.max_depth = unum(key, value);
        } else if (key == "min_leaf") {
            cfg.tree.min_leaf = unum(key, value);
            if (cfg.tree.min_leaf == 0) raise(errc::config_invalid, "min_leaf must be >= 1");
        } else if (key == "min_impurity_decrease") {
            cfg.tree.min_impurity_decrease = num(key, value);
            if (cfg.tree.min_impurity_decrease < 0.0) {
                raise(errc::config_invalid, "min_impurity_decrease must be >= 0");
            }
        } else if (key == "train_fraction") {
            cfg.train_fraction = num(key, value);
            if (!(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0)) {
                raise(errc::config_invalid, "train_fraction must lie in (0, 1)");
            }
        } else if (key == "cutoff_m") {
            cfg.cutoff_m = num(key, value);
            if (!(cfg.cutoff_m > 0.0)) raise(errc::config_invalid, "cutoff_m must be positive");
        } else if (key == "cutoff_dbm") {
            cfg.cutoff_dbm = num(key, value);
        } else if (key == "tolerance_pp") {
            cfg.tolerance_pp = num(key, value);
            if (cfg.tolerance_pp < 0.0) raise(errc::config_invalid, "tolerance_pp must be >= 0");
        } else if (key == "window") {
            cfg.window = parse_window(value);
        } else {
            raise(errc::config_invalid, "unknown config key '" + key + "'");
        }
    }
    return cfg;
}

ToolConfig load_tool_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        raise(errc::io_error, "cannot open config '" + path + "'");
    }
    return parse_tool_config(in);
}

} // namespace proxtrace::tools

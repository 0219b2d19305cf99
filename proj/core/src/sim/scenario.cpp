#include "proxtrace/sim/scenario.hpp"

#include "proxtrace/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace proxtrace::sim {

std::array<double, 2> Trajectory::position_at(double t_s) const {
    if (points.empty()) {
        raise(errc::config_invalid, "trajectory has no waypoints");
    }
    if (t_s <= points.front().t_s) {
        return {points.front().x_m, points.front().y_m};
    }
    if (t_s >= points.back().t_s) {
        return {points.back().x_m, points.back().y_m};
    }
    // Find the segment containing t_s.
    for (std::size_t k = 0; k + 1 < points.size(); ++k) {
        const Waypoint& a = points[k];
        const Waypoint& b = points[k + 1];
        if (t_s <= b.t_s) {
            const double u = (t_s - a.t_s) / (b.t_s - a.t_s);
            return {a.x_m + u * (b.x_m - a.x_m), a.y_m + u * (b.y_m - a.y_m)};
        }
    }
    return {points.back().x_m, points.back().y_m};   // unreachable
}

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

[[noreturn]] void fail_line(int line_no, const std::string& what) {
    std::ostringstream os;
    os << "scenario line " << line_no << ": " << what;
    raise(errc::config_invalid, os.str());
}

double parse_double(const std::string& v, int line_no) {
    double out = 0.0;
    const char* first = v.data();
    const char* last = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc{} || ptr != last || !std::isfinite(out)) {
        fail_line(line_no, "expected a number, got '" + v + "'");
    }
    return out;
}

std::int64_t parse_int(const std::string& v, int line_no) {
    std::int64_t out = 0;
    const char* first = v.data();
    const char* last = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc{} || ptr != last) {
        fail_line(line_no, "expected an integer, got '" + v + "'");
    }
    return out;
}

std::uint64_t parse_uint(const std::string& v, int line_no) {
    std::uint64_t out = 0;
    const char* first = v.data();
    const char* last = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc{} || ptr != last) {
        fail_line(line_no, "expected a non-negative integer, got '" + v + "'");
    }
    return out;
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

enum class Section { top, channel, classifier, agent, diagnosis };

} // namespace

ScenarioConfig parse_scenario(std::istream& in) {
    ScenarioConfig cfg;
    Section section = Section::top;
    AgentSpec* agent = nullptr;
    std::set<std::string> agent_ids;

    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (auto hash = raw.find('#'); hash != std::string::npos) {
            raw.erase(hash);
        }
        const std::string line = trim(raw);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') {
                fail_line(line_no, "unterminated section header");
            }
            const std::string name = trim(line.substr(1, line.size() - 2));
            if (name == "channel") {
                section = Section::channel;
            } else if (name == "classifier") {
                section = Section::classifier;
            } else if (name == "diagnosis") {
                section = Section::diagnosis;
            } else if (name.rfind("agent ", 0) == 0) {
                const std::string id = trim(name.substr(6));
                if (id.empty()) fail_line(line_no, "agent section needs an id");
                if (id.find(',') != std::string::npos) {
                    fail_line(line_no, "agent id must not contain ','");
                }
                if (!agent_ids.insert(id).second) {
                    fail_line(line_no, "duplicate agent '" + id + "'");
                }
                cfg.agents.push_back(AgentSpec{id, {}});
                agent = &cfg.agents.back();
                section = Section::agent;
            } else {
                fail_line(line_no, "unknown section '" + name + "'");
            }
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            fail_line(line_no, "expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            fail_line(line_no, "expected 'key = value'");
        }

        switch (section) {
        case Section::top:
            if (key == "duration_s") {
                cfg.duration_s = parse_int(value, line_no);
            } else if (key == "scan_interval_s") {
                cfg.scan_interval_s = static_cast<int>(parse_int(value, line_no));
            } else if (key == "cutoff_m") {
                cfg.cutoff_m = parse_double(value, line_no);
            } else if (key == "retention_days") {
                cfg.retention_days = static_cast<int>(parse_int(value, line_no));
            } else if (key == "risk_threshold_s") {
                cfg.risk_threshold_s = static_cast<std::uint32_t>(parse_uint(value, line_no));
            } else if (key == "rng_seed") {
                cfg.rng_seed = parse_uint(value, line_no);
            } else if (key == "mode") {
                if (value == "centralized") {
                    cfg.mode = protocol::Mode::centralized;
                } else if (value == "decentralized") {
                    cfg.mode = protocol::Mode::decentralized;
                } else {
                    fail_line(line_no, "mode must be centralized or decentralized");
                }
            } else if (key == "rotation_period_s") {
                cfg.rotation_period_s = static_cast<int>(parse_int(value, line_no));
            } else if (key == "merge_gap_s") {
                cfg.merge_gap_s = static_cast<int>(parse_int(value, line_no));
            } else if (key == "radio_range_m") {
                cfg.radio_range_m = parse_double(value, line_no);
            } else if (key == "device_offset_sigma_dbm") {
                cfg.device_offset_sigma_dbm = parse_double(value, line_no);
            } else {
                fail_line(line_no, "unknown key '" + key + "'");
            }
            break;
        case Section::channel:
            if (key == "p0_dbm") {
                cfg.channel.p0_dbm = parse_double(value, line_no);
            } else if (key == "n_exp") {
                cfg.channel.n_exp = parse_double(value, line_no);
            } else if (key == "sigma_dbm") {
                cfg.channel.sigma_dbm = parse_double(value, line_no);
            } else {
                fail_line(line_no, "unknown channel key '" + key + "'");
            }
            break;
        case Section::classifier:
            if (key == "kind") {
                if (value == "threshold") {
                    cfg.classifier.kind = ClassifierKind::threshold;
                } else if (value == "tree") {
                    cfg.classifier.kind = ClassifierKind::tree;
                } else {
                    fail_line(line_no, "classifier kind must be threshold or tree");
                }
            } else if (key == "cutoff_dbm") {
                if (value == "auto") {
                    cfg.classifier.cutoff_dbm.reset();
                } else {
                    cfg.classifier.cutoff_dbm = parse_double(value, line_no);
                }
            } else if (key == "path") {
                cfg.classifier.tree_path = value;
            } else {
                fail_line(line_no, "unknown classifier key '" + key + "'");
            }
            break;
        case Section::agent: {
            if (key != "waypoint") {
                fail_line(line_no, "unknown agent key '" + key + "'");
            }
            const auto parts = split_ws(value);
            if (parts.size() != 3) {
                fail_line(line_no, "waypoint needs 't x y'");
            }
            Waypoint w;
            w.t_s = parse_double(parts[0], line_no);
            w.x_m = parse_double(parts[1], line_no);
            w.y_m = parse_double(parts[2], line_no);
            agent->trajectory.points.push_back(w);
            break;
        }
        case Section::diagnosis: {
            if (key != "event") {
                fail_line(line_no, "unknown diagnosis key '" + key + "'");
            }
            const auto parts = split_ws(value);
            if (parts.size() != 2) {
                fail_line(line_no, "event needs 'agent time'");
            }
            cfg.diagnoses.push_back(DiagnosisEvent{parts[0], parse_int(parts[1], line_no)});
            break;
        }
        }
    }
    validate_scenario(cfg);
    return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        raise(errc::io_error, "cannot open scenario '" + path + "'");
    }
    return parse_scenario(in);
}

void validate_scenario(const ScenarioConfig& cfg) {
    auto fail = [](const std::string& what) { raise(errc::config_invalid, what); };

    if (cfg.duration_s <= 0) fail("duration_s must be positive");
    if (cfg.scan_interval_s <= 0) fail("scan_interval_s must be positive");
    if (!(cfg.cutoff_m > 0.0)) fail("cutoff_m must be positive");
    if (cfg.retention_days < 14 || cfg.retention_days > 21) {
        fail("retention_days must be within 14..21");
    }
    if (cfg.risk_threshold_s == 0) fail("risk_threshold_s must be positive");
    if (cfg.rotation_period_s <= 0 || cfg.rotation_period_s > protocol::kSecondsPerDay ||
        protocol::kSecondsPerDay % cfg.rotation_period_s != 0) {
        fail("rotation_period_s must divide 86400");
    }
    if (cfg.merge_gap_s < 0) fail("merge_gap_s must be non-negative");
    if (!(cfg.radio_range_m > 0.0)) fail("radio_range_m must be positive");
    if (cfg.device_offset_sigma_dbm < 0.0) fail("device_offset_sigma_dbm must be >= 0");
    if (!(cfg.channel.n_exp > 0.0)) fail("channel n_exp must be positive");
    if (cfg.channel.sigma_dbm < 0.0) fail("channel sigma_dbm must be >= 0");
    if (!std::isfinite(cfg.channel.p0_dbm)) fail("channel p0_dbm must be finite");
    if (cfg.classifier.kind == ClassifierKind::tree && cfg.classifier.tree_path.empty()) {
        fail("tree classifier needs a path");
    }

    std::set<std::string> ids;
    for (const auto& a : cfg.agents) {
        if (a.id.empty()) fail("agent id must not be empty");
        if (!ids.insert(a.id).second) fail("duplicate agent '" + a.id + "'");
        if (a.trajectory.points.empty()) {
            fail("agent '" + a.id + "' needs at least one waypoint");
        }
        for (std::size_t k = 0; k + 1 < a.trajectory.points.size(); ++k) {
            if (!(a.trajectory.points[k].t_s < a.trajectory.points[k + 1].t_s)) {
                fail("agent '" + a.id + "' waypoint times must be strictly increasing");
            }
        }
    }
    for (const auto& d : cfg.diagnoses) {
        if (ids.find(d.agent) == ids.end()) {
            fail("diagnosis of unknown agent '" + d.agent + "'");
        }
        if (d.t_s < 0 || d.t_s > cfg.duration_s) {
            fail("diagnosis time must lie within the run");
        }
    }
}

} // namespace proxtrace::sim

#pragma once

#include "proxtrace/protocol/payload.hpp"
#include "proxtrace/protocol/server.hpp"
#include "proxtrace/sim/channel.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace proxtrace::sim {

struct Waypoint {
    double t_s = 0.0;
    double x_m = 0.0;
    double y_m = 0.0;
};

/// Piecewise-constant-velocity path: linear interpolation between
/// consecutive waypoints, clamped to the end positions outside the span.
struct Trajectory {
    std::vector<Waypoint> points;   // timestamps strictly increasing

    std::array<double, 2> position_at(double t_s) const;
};

struct AgentSpec {
    protocol::DeviceId id;
    Trajectory trajectory;
};

struct DiagnosisEvent {
    protocol::DeviceId agent;
    std::int64_t t_s = 0;
};

enum class ClassifierKind { threshold, tree };

struct ClassifierSpec {
    ClassifierKind kind = ClassifierKind::threshold;
    // Threshold rule; empty means "auto": the channel's mean RSS at cutoff_m,
    // which makes a noiseless channel classify perfectly.
    std::optional<double> cutoff_dbm;
    std::string tree_path;   // kind == tree: decision-tree model file
};

/// Full description of one simulated world.
///
/// Scenario file format (line oriented; `#` starts a comment; keys outside
/// any section configure the run):
///
///   duration_s = 1800            total simulated time
///   scan_interval_s = 1          advertisement/scan period
///   cutoff_m = 2.0               close/far ground-truth distance
///   retention_days = 14          local store retention (14..21)
///   risk_threshold_s = 900       cumulative close seconds per day to alert
///   rng_seed = 42
///   mode = decentralized         or: centralized
///   rotation_period_s = 900      token rotation (must divide 86400)
///   merge_gap_s = 300            encounter record merge gap
///   radio_range_m = 25           no packets synthesized beyond this
///   device_offset_sigma_dbm = 0  per-agent constant RSS offset spread
///
///   [channel]                    path-loss channel
///   p0_dbm = -60
///   n_exp = 2.0
///   sigma_dbm = 0
///
///   [classifier]                 optional; default threshold/auto
///   kind = threshold             or: tree
///   cutoff_dbm = auto            explicit dBm value or "auto"
///   path = model.tree.json       tree kind only
///
///   [agent A]                    one section per agent
///   waypoint = 0 0 0             t_s x_m y_m; repeat, times increasing
///   waypoint = 1800 0 0
///
///   [diagnosis]
///   event = A 1700               agent id, report time
///
/// Unknown keys or sections are rejected.
struct ScenarioConfig {
    std::int64_t duration_s = 1800;
    int scan_interval_s = 1;
    double cutoff_m = 2.0;
    int retention_days = 14;
    std::uint32_t risk_threshold_s = 900;
    PathLossModel channel;
    std::uint64_t rng_seed = 0;
    protocol::Mode mode = protocol::Mode::decentralized;
    int rotation_period_s = protocol::kDefaultRotationPeriodS;
    int merge_gap_s = 300;
    double radio_range_m = 25.0;
    double device_offset_sigma_dbm = 0.0;
    ClassifierSpec classifier;
    std::vector<AgentSpec> agents;
    std::vector<DiagnosisEvent> diagnoses;
};

/// Parses the format above. Throws errc::config_invalid with a line-number
/// diagnostic on unknown keys, bad values, or duplicate agents.
ScenarioConfig parse_scenario(std::istream& in);
ScenarioConfig load_scenario(const std::string& path);

/// Full semantic validation (positivity, rotation divides a day, waypoint
/// ordering, diagnosis agents exist and report within the run). Throws
/// errc::config_invalid.
void validate_scenario(const ScenarioConfig& cfg);

} // namespace proxtrace::sim

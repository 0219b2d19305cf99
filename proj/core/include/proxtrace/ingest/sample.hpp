#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace proxtrace::ingest {

enum class DeviceKind { smartphone, smartwatch };

/// Placement of the two devices during a measurement session.
/// HH..BB are the six smartphone combinations, LR..RR the four
/// smartwatch wrist combinations.
enum class PositionPair { HH, HP, HB, PB, PP, BB, LR, RL, LL, RR };

enum class PositionGroup { direct, crosswise };

enum class ProximityLabel { close, far };

const char* to_string(DeviceKind k);
const char* to_string(PositionPair p);
const char* to_string(PositionGroup g);
const char* to_string(ProximityLabel l);

/// Parses a position token ("HH", "hand-to-hand", "LR", ...). Returns
/// nullopt for anything outside the ten known combinations.
std::optional<PositionPair> parse_position(std::string_view token);

DeviceKind device_of(PositionPair p);

/// LR, RL face each other; LL, RR are crosswise. Smartwatch pairs only.
PositionGroup group_of(PositionPair p);

bool is_smartwatch_pair(PositionPair p);

struct RssSample {
    double rss_dbm = 0.0;
    double distance_m = 0.0;
    PositionPair position_pair = PositionPair::HH;
    DeviceKind device_kind = DeviceKind::smartphone;
    std::string session_id;
    std::optional<double> t_offset_s;

    bool operator==(const RssSample&) const = default;
};

/// Checks the domain invariants: positive distance, position/device
/// agreement, and the per-device distance grids (13 fixed smartphone
/// distances, smartwatch range 0.5..5 m). Returns an explanation on
/// failure, nullopt when the sample is well formed.
std::optional<std::string> validate_sample(const RssSample& s);

/// close iff distance <= cutoff. The boundary is inclusive: a contact at
/// exactly the cutoff counts as close (prefer a false alarm over a missed
/// contact).
ProximityLabel label_sample(const RssSample& s, double cutoff_m);
ProximityLabel label_distance(double distance_m, double cutoff_m);

} // namespace proxtrace::ingest

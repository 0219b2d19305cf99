#include "proxtrace/ingest/sample.hpp"

#include "proxtrace/error.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>

namespace proxtrace::ingest {

namespace {

// The 13 smartphone measurement distances: 0.2..2.0 m in 0.2 m steps,
// then 3, 4, 5 m.
constexpr std::array<double, 13> kPhoneDistances = {0.2, 0.4, 0.6, 0.8, 1.0, 1.2, 1.4,
                                                    1.6, 1.8, 2.0, 3.0, 4.0, 5.0};
constexpr double kGridEps = 1e-6;

std::string upper(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return out;
}

} // namespace

const char* to_string(DeviceKind k) {
    return k == DeviceKind::smartphone ? "smartphone" : "smartwatch";
}

const char* to_string(PositionPair p) {
    switch (p) {
    case PositionPair::HH: return "HH";
    case PositionPair::HP: return "HP";
    case PositionPair::HB: return "HB";
    case PositionPair::PB: return "PB";
    case PositionPair::PP: return "PP";
    case PositionPair::BB: return "BB";
    case PositionPair::LR: return "LR";
    case PositionPair::RL: return "RL";
    case PositionPair::LL: return "LL";
    case PositionPair::RR: return "RR";
    }
    return "?";
}

const char* to_string(PositionGroup g) {
    return g == PositionGroup::direct ? "direct" : "crosswise";
}

const char* to_string(ProximityLabel l) {
    return l == ProximityLabel::close ? "close" : "far";
}

std::optional<PositionPair> parse_position(std::string_view token) {
    const std::string u = upper(token);
    if (u == "HH" || u == "HAND-TO-HAND") return PositionPair::HH;
    if (u == "HP" || u == "HAND-TO-POCKET") return PositionPair::HP;
    if (u == "HB" || u == "HAND-TO-BACKPACK") return PositionPair::HB;
    if (u == "PB" || u == "POCKET-TO-BACKPACK") return PositionPair::PB;
    if (u == "PP" || u == "POCKET-TO-POCKET") return PositionPair::PP;
    if (u == "BB" || u == "BACKPACK-TO-BACKPACK") return PositionPair::BB;
    if (u == "LR" || u == "LEFT-TO-RIGHT") return PositionPair::LR;
    if (u == "RL" || u == "RIGHT-TO-LEFT") return PositionPair::RL;
    if (u == "LL" || u == "LEFT-TO-LEFT") return PositionPair::LL;
    if (u == "RR" || u == "RIGHT-TO-RIGHT") return PositionPair::RR;
    return std::nullopt;
}

DeviceKind device_of(PositionPair p) {
    return is_smartwatch_pair(p) ? DeviceKind::smartwatch : DeviceKind::smartphone;
}

bool is_smartwatch_pair(PositionPair p) {
    switch (p) {
    case PositionPair::LR:
    case PositionPair::RL:
    case PositionPair::LL:
    case PositionPair::RR: return true;
    default: return false;
    }
}

PositionGroup group_of(PositionPair p) {
    switch (p) {
    case PositionPair::LR:
    case PositionPair::RL: return PositionGroup::direct;
    case PositionPair::LL:
    case PositionPair::RR: return PositionGroup::crosswise;
    default: raise(errc::malformed_data, "position group is defined for smartwatch pairs only");
    }
}

std::optional<std::string> validate_sample(const RssSample& s) {
    if (!(s.distance_m > 0)) return "distance_m must be positive";
    if (device_of(s.position_pair) != s.device_kind)
        return std::string("position ") + to_string(s.position_pair) + " does not match device kind " +
               to_string(s.device_kind);
    if (s.device_kind == DeviceKind::smartphone) {
        const bool on_grid =
            std::any_of(kPhoneDistances.begin(), kPhoneDistances.end(),
                        [&](double d) { return std::fabs(d - s.distance_m) < kGridEps; });
        if (!on_grid) return "smartphone distance off the 13-point measurement grid";
    } else {
        if (s.distance_m < 0.5 - kGridEps || s.distance_m > 5.0 + kGridEps)
            return "smartwatch distance outside 0.5..5 m";
    }
    return std::nullopt;
}

ProximityLabel label_distance(double distance_m, double cutoff_m) {
    if (!(cutoff_m > 0)) raise(errc::config_invalid, "cutoff_m must be positive");
    return distance_m <= cutoff_m ? ProximityLabel::close : ProximityLabel::far;
}

ProximityLabel label_sample(const RssSample& s, double cutoff_m) {
    return label_distance(s.distance_m, cutoff_m);
}

} // namespace proxtrace::ingest

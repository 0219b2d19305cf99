#pragma once

#include "proxtrace/protocol/payload.hpp"
#include "proxtrace/protocol/store.hpp"

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace proxtrace::protocol {

using DeviceId = std::string;

struct ExposureAlert {
    std::int64_t day_index = 0;
    std::uint32_t cumulative_close_s = 0;
    bool triggered = false;

    bool operator==(const ExposureAlert&) const = default;
};

constexpr std::uint32_t kDefaultRiskThresholdS = 900;   // 15 min cumulative close per day

/// Sums close seconds over the records matched for one day; triggered iff
/// the sum reaches the threshold.
ExposureAlert risk_score(const std::vector<EncounterRecord>& matched, std::int64_t day_index,
                         std::uint32_t threshold_s);

/// Local matching against a broadcast of diagnosed seeds: expands each
/// seed to its day's tokens, intersects with the store, aggregates close
/// seconds per seed-day and scores each day. Alerts are returned (in day
/// order) for every day with at least one matching record; `triggered`
/// carries the risk verdict. Throws errc::bad_payload for a payload that
/// is not decentralized.
std::vector<ExposureAlert> client_match(const LocalStore& store, const DiagnosisPayload& payload,
                                        int rotation_period_s, std::uint32_t risk_threshold_s);

/// Centralized flow (cloud stores everything): devices register their
/// identity and daily seeds and continually upload their sealed encounter
/// logs; on a diagnosis the server alone computes who to alert.
class CentralServer {
public:
    CentralServer(SealKey seal_key, int rotation_period_s, std::uint32_t risk_threshold_s);

    void register_device(const DeviceId& id);
    bool is_registered(const DeviceId& id) const;

    /// The server knows which tokens belong to whom in this flow.
    void submit_seed(const DeviceId& id, std::int64_t day_index, const DailySeed& seed);

    /// Stores (replaces) a device's latest sealed log upload. The payload
    /// must be centralized-mode and pass the integrity check.
    void upload_log(const DeviceId& id, const std::vector<std::uint8_t>& payload_bytes);

    struct MatchResult {
        DeviceId device;
        std::vector<ExposureAlert> alerts;   // one per day with matching tokens
    };

    /// Matching computation for a diagnosed device: every other device
    /// whose uploaded log contains a token belonging to the diagnosed
    /// device is scored per day. Devices without a matching token receive
    /// nothing. Throws errc::unknown_device when the diagnosed id was
    /// never registered.
    std::vector<MatchResult> match_diagnosis(const DeviceId& diagnosed,
                                             const std::vector<std::uint8_t>& diagnosis_bytes);

    std::size_t uploaded_log_count() const { return logs_.size(); }

private:
    SealKey seal_key_;
    int rotation_period_s_;
    std::uint32_t risk_threshold_s_;
    std::set<DeviceId> registry_;
    std::map<DeviceId, std::map<std::int64_t, DailySeed>> seeds_;
    std::map<DeviceId, std::vector<std::uint8_t>> logs_;
};

/// Decentralized flow: the server is a relay. Its whole state is the
/// registry plus retained diagnosed payload bytes for replay to late
/// registrants — there is no member capable of holding encounter records.
class DecentralServer {
public:
    explicit DecentralServer(int retention_days = 14);

    struct Delivery {
        DeviceId device;
        std::vector<std::uint8_t> payload;
    };

    struct RetainedPayload {
        std::int64_t uploaded_at = 0;
        std::vector<std::uint8_t> payload;
    };

    /// Registers a device and replays every retained payload to it, so
    /// broadcast semantics do not depend on registration timing.
    std::vector<Delivery> register_device(const DeviceId& id, std::int64_t now);

    /// Validates that the payload is decentralized (seeds only), retains
    /// it for the retention window and delivers one identical copy to
    /// every registered device.
    std::vector<Delivery> broadcast(const std::vector<std::uint8_t>& payload_bytes,
                                    std::int64_t now);

    /// Drops retained payloads older than the retention window.
    void expire_payloads(std::int64_t now);

    const std::set<DeviceId>& registry() const { return registry_; }
    const std::vector<RetainedPayload>& retained_payloads() const { return retained_; }
    int retention_days() const { return retention_days_; }

private:
    int retention_days_;
    std::set<DeviceId> registry_;
    std::vector<RetainedPayload> retained_;
};

} // namespace proxtrace::protocol

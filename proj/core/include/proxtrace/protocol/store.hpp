#pragma once

#include "proxtrace/ingest/features.hpp"
#include "proxtrace/ingest/sample.hpp"
#include "proxtrace/protocol/token.hpp"

#include <cstdint>
#include <limits>
#include <map>
#include <unordered_map>
#include <vector>

namespace proxtrace::protocol {

using ingest::ProximityLabel;

/// One observed token with its sighting window and accumulated RSS
/// statistics. Close time accrues scan_interval seconds per close-labelled
/// sighting merged into the record, so close_duration_s never exceeds
/// last_seen - first_seen.
struct EncounterRecord {
    Token observed_token{};
    std::int64_t first_seen = 0;
    std::int64_t last_seen = 0;
    std::uint32_t close_duration_s = 0;

    // RSS accumulators; kept exact so sealed logs round-trip bit-for-bit.
    std::uint32_t sample_count = 0;
    double rss_sum = 0.0;
    double rss_sumsq = 0.0;
    double rss_min = 0.0;
    double rss_max = 0.0;

    ingest::FeatureVector rss_stats() const;

    bool operator==(const EncounterRecord&) const = default;
};

struct StoreParams {
    int merge_gap_s = 300;      // sightings of one token further apart open a new record
    int scan_interval_s = 1;    // close seconds credited per close sighting
};

struct TokenHash {
    std::size_t operator()(const Token& t) const noexcept;
};

/// A device's local encounter storage plus its own daily seeds. Mutated by
/// a single logical actor; timestamps must be monotone.
class LocalStore {
public:
    explicit LocalStore(int retention_days = 14, StoreParams params = {});

    int retention_days() const { return retention_days_; }
    const StoreParams& params() const { return params_; }
    const std::vector<EncounterRecord>& records() const { return records_; }
    const std::map<std::int64_t, DailySeed>& own_seeds() const { return own_seeds_; }

    /// Registers this device's seed for a day; own tokens are indexed so
    /// the store can never record itself.
    void add_own_seed(std::int64_t day_index, const DailySeed& seed, int rotation_period_s);

    /// Merges the sighting into the open record for `token` (gap since
    /// last_seen <= merge_gap_s) or opens a new record. Close verdicts on
    /// merged sightings accrue scan_interval_s. Throws errc::clock_regression
    /// when `t` precedes an earlier call.
    void record_encounter(const Token& token, double rss_dbm, std::int64_t t,
                          ProximityLabel verdict);

    /// Erases records with last_seen older than the retention window and
    /// seeds of fully-expired days. Returns the number of purged records.
    /// Idempotent for a fixed `now`.
    std::size_t purge_expired(std::int64_t now);

    /// Records whose observed token appears in `tokens`.
    std::vector<EncounterRecord> find_records(const Token& token) const;

private:
    int retention_days_;
    StoreParams params_;
    std::vector<EncounterRecord> records_;
    std::map<std::int64_t, DailySeed> own_seeds_;
    std::unordered_map<Token, std::vector<std::size_t>, TokenHash> by_token_;
    std::unordered_map<Token, std::int64_t, TokenHash> own_tokens_;   // token -> day
    std::int64_t last_t_ = std::numeric_limits<std::int64_t>::min();

    void rebuild_index();
};

} // namespace proxtrace::protocol

#include "proxtrace/protocol/store.hpp"

#include "proxtrace/error.hpp"
#include "proxtrace/hash.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

namespace proxtrace::protocol {

ingest::FeatureVector EncounterRecord::rss_stats() const {
    ingest::FeatureVector f;
    if (sample_count == 0) return f;
    const double n = static_cast<double>(sample_count);
    f.rss_mean_dbm = rss_sum / n;
    f.rss_std_dbm = std::sqrt(std::max(0.0, rss_sumsq / n - f.rss_mean_dbm * f.rss_mean_dbm));
    f.rss_min_dbm = rss_min;
    f.rss_max_dbm = rss_max;
    f.sample_count = sample_count;
    return f;
}

std::size_t TokenHash::operator()(const Token& t) const noexcept {
    std::uint64_t v = 0;
    std::memcpy(&v, t.data(), sizeof(v));
    return static_cast<std::size_t>(v);
}

LocalStore::LocalStore(int retention_days, StoreParams params)
    : retention_days_(retention_days), params_(params) {
    if (retention_days < 14 || retention_days > 21)
        raise(errc::config_invalid, "retention_days must be within 14..21");
    if (params.merge_gap_s <= 0 || params.scan_interval_s <= 0)
        raise(errc::config_invalid, "store params must be positive");
}

void LocalStore::add_own_seed(std::int64_t day_index, const DailySeed& seed,
                              int rotation_period_s) {
    own_seeds_[day_index] = seed;
    for (const Token& t : day_tokens(seed, rotation_period_s)) own_tokens_[t] = day_index;
}

void LocalStore::record_encounter(const Token& token, double rss_dbm, std::int64_t t,
                                  ProximityLabel verdict) {
    if (t < last_t_)
        raise(errc::clock_regression,
              "timestamp " + std::to_string(t) + " precedes " + std::to_string(last_t_));
    last_t_ = t;

    if (own_tokens_.contains(token)) return;   // a device never records itself

    auto& slots = by_token_[token];
    EncounterRecord* open = nullptr;
    if (!slots.empty()) {
        EncounterRecord& candidate = records_[slots.back()];
        if (t - candidate.last_seen <= params_.merge_gap_s) open = &candidate;
    }

    if (open) {
        open->last_seen = t;
        open->sample_count += 1;
        open->rss_sum += rss_dbm;
        open->rss_sumsq += rss_dbm * rss_dbm;
        open->rss_min = std::min(open->rss_min, rss_dbm);
        open->rss_max = std::max(open->rss_max, rss_dbm);
        if (verdict == ProximityLabel::close)
            open->close_duration_s += static_cast<std::uint32_t>(params_.scan_interval_s);
        return;
    }

    EncounterRecord rec;
    rec.observed_token = token;
    rec.first_seen = t;
    rec.last_seen = t;
    rec.close_duration_s = 0;
    rec.sample_count = 1;
    rec.rss_sum = rss_dbm;
    rec.rss_sumsq = rss_dbm * rss_dbm;
    rec.rss_min = rss_dbm;
    rec.rss_max = rss_dbm;
    slots.push_back(records_.size());
    records_.push_back(rec);
}

std::size_t LocalStore::purge_expired(std::int64_t now) {
    const std::int64_t horizon = now - static_cast<std::int64_t>(retention_days_) * kSecondsPerDay;

    const std::size_t before = records_.size();
    std::erase_if(records_, [&](const EncounterRecord& r) { return r.last_seen < horizon; });
    const std::size_t purged = before - records_.size();
    if (purged > 0) rebuild_index();

    // A day's seed expires once the whole day lies beyond the horizon.
    for (auto it = own_seeds_.begin(); it != own_seeds_.end();) {
        const std::int64_t day_end = (it->first + 1) * kSecondsPerDay;
        if (day_end < horizon) {
            it = own_seeds_.erase(it);
        } else {
            ++it;
        }
    }
    std::erase_if(own_tokens_, [&](const auto& kv) { return !own_seeds_.contains(kv.second); });
    return purged;
}

std::vector<EncounterRecord> LocalStore::find_records(const Token& token) const {
    std::vector<EncounterRecord> out;
    if (auto it = by_token_.find(token); it != by_token_.end())
        for (std::size_t i : it->second) out.push_back(records_[i]);
    return out;
}

void LocalStore::rebuild_index() {
    by_token_.clear();
    for (std::size_t i = 0; i < records_.size(); ++i)
        by_token_[records_[i].observed_token].push_back(i);
}

} // namespace proxtrace::protocol

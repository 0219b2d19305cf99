#include "proxtrace/protocol/server.hpp"

#include "proxtrace/error.hpp"

#include <algorithm>
#include <unordered_map>

namespace proxtrace::protocol {

ExposureAlert risk_score(const std::vector<EncounterRecord>& matched, std::int64_t day_index,
                         std::uint32_t threshold_s) {
    ExposureAlert alert;
    alert.day_index = day_index;
    for (const auto& r : matched) alert.cumulative_close_s += r.close_duration_s;
    alert.triggered = alert.cumulative_close_s >= threshold_s;
    return alert;
}

std::vector<ExposureAlert> client_match(const LocalStore& store, const DiagnosisPayload& payload,
                                        int rotation_period_s, std::uint32_t risk_threshold_s) {
    if (payload.mode != Mode::decentralized)
        raise(errc::bad_payload, "client matching expects a decentralized payload");

    std::map<std::int64_t, std::vector<EncounterRecord>> matched_by_day;
    for (const auto& entry : payload.seeds) {
        for (const Token& token : day_tokens(entry.seed, rotation_period_s)) {
            for (auto& rec : store.find_records(token))
                matched_by_day[entry.day_index].push_back(std::move(rec));
        }
    }

    std::vector<ExposureAlert> alerts;
    for (const auto& [day, records] : matched_by_day)
        alerts.push_back(risk_score(records, day, risk_threshold_s));
    return alerts;
}

CentralServer::CentralServer(SealKey seal_key, int rotation_period_s,
                             std::uint32_t risk_threshold_s)
    : seal_key_(seal_key), rotation_period_s_(rotation_period_s),
      risk_threshold_s_(risk_threshold_s) {
    slots_per_day(rotation_period_s);   // validates
}

void CentralServer::register_device(const DeviceId& id) { registry_.insert(id); }

bool CentralServer::is_registered(const DeviceId& id) const { return registry_.contains(id); }

void CentralServer::submit_seed(const DeviceId& id, std::int64_t day_index,
                                const DailySeed& seed) {
    if (!registry_.contains(id)) raise(errc::unknown_device, "seed from unregistered '" + id + "'");
    seeds_[id][day_index] = seed;
}

void CentralServer::upload_log(const DeviceId& id, const std::vector<std::uint8_t>& payload_bytes) {
    if (!registry_.contains(id))
        raise(errc::unknown_device, "upload from unregistered '" + id + "'");
    const DiagnosisPayload p = decode_payload(payload_bytes, seal_key_);
    if (p.mode != Mode::centralized)
        raise(errc::bad_payload, "centralized server stores centralized logs only");
    logs_[id] = payload_bytes;   // atomic replace of the device's latest log
}

std::vector<CentralServer::MatchResult>
CentralServer::match_diagnosis(const DeviceId& diagnosed,
                               const std::vector<std::uint8_t>& diagnosis_bytes) {
    if (!registry_.contains(diagnosed))
        raise(errc::unknown_device, "diagnosis for unregistered '" + diagnosed + "'");
    upload_log(diagnosed, diagnosis_bytes);

    // Token -> day map of the diagnosed device, from its registered seeds.
    std::unordered_map<Token, std::int64_t, TokenHash> diagnosed_tokens;
    if (auto it = seeds_.find(diagnosed); it != seeds_.end()) {
        for (const auto& [day, seed] : it->second)
            for (const Token& t : day_tokens(seed, rotation_period_s_)) diagnosed_tokens[t] = day;
    }

    std::vector<MatchResult> results;
    for (const auto& [device, log_bytes] : logs_) {
        if (device == diagnosed) continue;
        const DiagnosisPayload log = decode_payload(log_bytes, seal_key_);
        std::map<std::int64_t, std::vector<EncounterRecord>> matched_by_day;
        for (const auto& rec : log.records) {
            if (auto it = diagnosed_tokens.find(rec.observed_token); it != diagnosed_tokens.end())
                matched_by_day[it->second].push_back(rec);
        }
        if (matched_by_day.empty()) continue;   // non-matching devices receive nothing

        MatchResult r;
        r.device = device;
        for (const auto& [day, records] : matched_by_day)
            r.alerts.push_back(risk_score(records, day, risk_threshold_s_));
        results.push_back(std::move(r));
    }
    return results;
}

DecentralServer::DecentralServer(int retention_days) : retention_days_(retention_days) {
    if (retention_days < 14 || retention_days > 21)
        raise(errc::config_invalid, "retention_days must be within 14..21");
}

std::vector<DecentralServer::Delivery> DecentralServer::register_device(const DeviceId& id,
                                                                        std::int64_t now) {
    expire_payloads(now);
    registry_.insert(id);
    std::vector<Delivery> replays;
    for (const auto& retained : retained_) replays.push_back({id, retained.payload});
    return replays;
}

std::vector<DecentralServer::Delivery>
DecentralServer::broadcast(const std::vector<std::uint8_t>& payload_bytes, std::int64_t now) {
    // Reject anything that is not a pure seed payload; the relay never
    // accepts encounter data.
    const DiagnosisPayload p = decode_payload(payload_bytes, default_seal_key());
    if (p.mode != Mode::decentralized)
        raise(errc::bad_payload, "decentralized relay accepts seed payloads only");

    expire_payloads(now);
    retained_.push_back({now, payload_bytes});

    std::vector<Delivery> deliveries;
    for (const auto& device : registry_) deliveries.push_back({device, payload_bytes});
    return deliveries;
}

void DecentralServer::expire_payloads(std::int64_t now) {
    const std::int64_t horizon = now - static_cast<std::int64_t>(retention_days_) * kSecondsPerDay;
    std::erase_if(retained_, [&](const RetainedPayload& r) { return r.uploaded_at < horizon; });
}

} // namespace proxtrace::protocol

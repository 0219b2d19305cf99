#include "proxtrace/sim/run.hpp"

#include "proxtrace/classify/eval.hpp"
#include "proxtrace/error.hpp"
#include "proxtrace/ingest/features.hpp"
#include "proxtrace/protocol/payload.hpp"
#include "proxtrace/protocol/server.hpp"
#include "proxtrace/protocol/store.hpp"
#include "proxtrace/protocol/token.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

namespace proxtrace::sim {

namespace {

// Co-located waypoints would put two radios at distance zero; the channel
// needs d > 0, so synthesized distances are floored at 5 cm.
constexpr double kMinSynthDistanceM = 0.05;

std::mt19937_64 seeded_rng(std::uint64_t seed) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                      static_cast<std::uint32_t>(seed >> 32)};
    return std::mt19937_64(seq);
}

} // namespace

ingest::ProximityLabel ThresholdClassifier::classify(double rss_dbm) const {
    return classify::threshold_baseline(rss_dbm, cutoff_dbm_);
}

TreeClassifier::TreeClassifier(classify::TreeNode tree, ingest::PositionPair position)
    : tree_(std::move(tree)), position_(position) {}

ingest::ProximityLabel TreeClassifier::classify(double rss_dbm) const {
    return classify::predict(tree_, ingest::single_sample_features(rss_dbm, position_));
}

std::unique_ptr<Classifier> make_classifier(const ScenarioConfig& cfg) {
    if (cfg.classifier.kind == ClassifierKind::threshold) {
        const double cutoff = cfg.classifier.cutoff_dbm
                                  ? *cfg.classifier.cutoff_dbm
                                  : mean_rss_at(cfg.channel, cfg.cutoff_m);
        return std::make_unique<ThresholdClassifier>(cutoff);
    }
    std::ifstream in(cfg.classifier.tree_path);
    if (!in) {
        raise(errc::io_error, "cannot open tree model '" + cfg.classifier.tree_path + "'");
    }
    std::ostringstream text;
    text << in.rdbuf();
    return std::make_unique<TreeClassifier>(classify::tree_from_json(text.str()));
}

PairKey make_pair_key(const protocol::DeviceId& x, const protocol::DeviceId& y,
                      std::int64_t day) {
    return x < y ? PairKey{x, y, day} : PairKey{y, x, day};
}

std::set<PairKey> ground_truth_contacts(const std::vector<AgentSpec>& agents, double cutoff_m,
                                        std::uint32_t min_duration_s, std::int64_t duration_s,
                                        int scan_interval_s) {
    if (scan_interval_s <= 0 || duration_s < 0) {
        raise(errc::config_invalid, "ground truth needs positive step and duration");
    }
    std::map<PairKey, std::int64_t> close_s;
    for (std::int64_t t = 0; t < duration_s; t += scan_interval_s) {
        std::vector<std::array<double, 2>> pos(agents.size());
        for (std::size_t i = 0; i < agents.size(); ++i) {
            pos[i] = agents[i].trajectory.position_at(static_cast<double>(t));
        }
        const std::int64_t day = protocol::day_of(t);
        for (std::size_t i = 0; i < agents.size(); ++i) {
            for (std::size_t j = i + 1; j < agents.size(); ++j) {
                const double d = std::hypot(pos[i][0] - pos[j][0], pos[i][1] - pos[j][1]);
                if (d <= cutoff_m) {
                    close_s[make_pair_key(agents[i].id, agents[j].id, day)] += scan_interval_s;
                }
            }
        }
    }
    std::set<PairKey> out;
    for (const auto& [key, secs] : close_s) {
        if (secs >= static_cast<std::int64_t>(min_duration_s)) {
            out.insert(key);
        }
    }
    return out;
}

namespace {

struct ProtocolWorld {
    const ScenarioConfig& cfg;
    std::vector<protocol::LocalStore> stores;
    std::vector<double> offsets;                 // per-agent constant RSS bias
    std::map<std::int64_t, std::vector<protocol::DailySeed>> seeds_by_day;
    protocol::SealKey seal_key = protocol::default_seal_key();
    std::unique_ptr<protocol::CentralServer> central;
    std::unique_ptr<protocol::DecentralServer> decentral;

    // Outcome accumulators.
    std::set<PairKey> candidate;
    std::set<PairKey> alerted;
    std::map<PairKey, std::uint32_t> cumulative;

    explicit ProtocolWorld(const ScenarioConfig& c) : cfg(c) {
        protocol::StoreParams params;
        params.merge_gap_s = cfg.merge_gap_s;
        params.scan_interval_s = cfg.scan_interval_s;
        stores.reserve(cfg.agents.size());
        for (std::size_t i = 0; i < cfg.agents.size(); ++i) {
            stores.emplace_back(cfg.retention_days, params);
        }
        offsets.assign(cfg.agents.size(), 0.0);
        if (cfg.mode == protocol::Mode::centralized) {
            central = std::make_unique<protocol::CentralServer>(seal_key, cfg.rotation_period_s,
                                                                cfg.risk_threshold_s);
            for (const auto& a : cfg.agents) {
                central->register_device(a.id);
            }
        } else {
            decentral = std::make_unique<protocol::DecentralServer>(cfg.retention_days);
            for (const auto& a : cfg.agents) {
                decentral->register_device(a.id, 0);
            }
        }
    }

    void ensure_day(std::int64_t day) {
        if (seeds_by_day.count(day) != 0) {
            return;
        }
        auto& seeds = seeds_by_day[day];
        seeds.reserve(cfg.agents.size());
        for (std::size_t i = 0; i < cfg.agents.size(); ++i) {
            const auto seed = protocol::make_seed(cfg.rng_seed, static_cast<std::uint64_t>(i),
                                                  static_cast<std::uint64_t>(day));
            seeds.push_back(seed);
            stores[i].add_own_seed(day, seed, cfg.rotation_period_s);
            if (central) {
                central->submit_seed(cfg.agents[i].id, day, seed);
            }
        }
    }

    void note_alert(const PairKey& key, const protocol::ExposureAlert& alert) {
        auto [it, inserted] = cumulative.try_emplace(key, alert.cumulative_close_s);
        if (!inserted) {
            it->second = std::max(it->second, alert.cumulative_close_s);
        }
        if (alert.triggered) {
            alerted.insert(key);
        }
    }

    /// Runs the configured protocol path for a diagnosis of `diag` handled
    /// at simulation time `now` (alerts can only involve data the stores
    /// held at that moment).
    void handle_diagnosis(std::size_t diag, std::int64_t now) {
        const std::int64_t data_end = std::min(now, cfg.duration_s - 1);
        const std::int64_t day_hi = protocol::day_of(std::max<std::int64_t>(data_end, 0));
        const std::int64_t day_lo = std::max<std::int64_t>(0, day_hi - cfg.retention_days);
        const auto& diag_id = cfg.agents[diag].id;
        for (std::size_t o = 0; o < cfg.agents.size(); ++o) {
            if (o == diag) continue;
            for (std::int64_t d = day_lo; d <= day_hi; ++d) {
                candidate.insert(make_pair_key(diag_id, cfg.agents[o].id, d));
            }
        }

        if (central) {
            // The cloud continually receives sealed logs in this flow; the
            // simulator brings every device current at the moment it matters.
            std::vector<std::uint8_t> diag_bytes;
            for (std::size_t k = 0; k < cfg.agents.size(); ++k) {
                auto payload = protocol::build_diagnosis_payload(
                    stores[k], protocol::Mode::centralized, /*consent=*/true);
                auto bytes = protocol::encode_payload(payload, seal_key);
                central->upload_log(cfg.agents[k].id, bytes);
                if (k == diag) {
                    diag_bytes = std::move(bytes);
                }
            }
            const auto results = central->match_diagnosis(diag_id, diag_bytes);
            for (const auto& res : results) {
                for (const auto& alert : res.alerts) {
                    note_alert(make_pair_key(diag_id, res.device, alert.day_index), alert);
                }
            }
        } else {
            const auto payload = protocol::build_diagnosis_payload(
                stores[diag], protocol::Mode::decentralized, /*consent=*/true);
            const auto bytes = protocol::encode_payload(payload, seal_key);
            const auto deliveries = decentral->broadcast(bytes, now);
            for (const auto& delivery : deliveries) {
                const auto received = protocol::decode_payload(delivery.payload, seal_key);
                // Locate the receiving store; matching is local to each device.
                for (std::size_t o = 0; o < cfg.agents.size(); ++o) {
                    if (cfg.agents[o].id != delivery.device) continue;
                    const auto alerts = protocol::client_match(
                        stores[o], received, cfg.rotation_period_s, cfg.risk_threshold_s);
                    for (const auto& alert : alerts) {
                        note_alert(make_pair_key(diag_id, cfg.agents[o].id, alert.day_index),
                                   alert);
                    }
                    break;
                }
            }
        }
    }
};

} // namespace

SimMetrics run_scenario(const ScenarioConfig& cfg, const Classifier& classifier) {
    validate_scenario(cfg);

    const std::size_t n = cfg.agents.size();
    auto rng = seeded_rng(cfg.rng_seed);
    ProtocolWorld world(cfg);

    if (cfg.device_offset_sigma_dbm > 0.0) {
        std::normal_distribution<double> offset(0.0, cfg.device_offset_sigma_dbm);
        for (std::size_t i = 0; i < n; ++i) {
            world.offsets[i] = offset(rng);
        }
    }

    // Diagnosis events fire at the first step >= their time, after that
    // step's scan; ties keep file order.
    std::vector<DiagnosisEvent> events = cfg.diagnoses;
    std::stable_sort(events.begin(), events.end(),
                     [](const DiagnosisEvent& a, const DiagnosisEvent& b) { return a.t_s < b.t_s; });
    auto agent_index = [&](const protocol::DeviceId& id) {
        for (std::size_t i = 0; i < n; ++i) {
            if (cfg.agents[i].id == id) return i;
        }
        raise(errc::config_invalid, "diagnosis of unknown agent '" + id + "'");
    };
    std::size_t next_event = 0;

    std::int64_t current_day = -1;
    std::vector<protocol::Token> tokens(n);
    std::vector<std::array<double, 2>> pos(n);
    std::uint32_t token_slot = 0;
    bool tokens_valid = false;

    for (std::int64_t t = 0; t < cfg.duration_s; t += cfg.scan_interval_s) {
        const std::int64_t day = protocol::day_of(t);
        if (day != current_day) {
            current_day = day;
            world.ensure_day(day);
            for (auto& store : world.stores) {
                store.purge_expired(t);
            }
            tokens_valid = false;
        }
        const std::uint32_t slot = protocol::slot_of(t, cfg.rotation_period_s);
        if (!tokens_valid || slot != token_slot) {
            const auto& seeds = world.seeds_by_day.at(day);
            for (std::size_t i = 0; i < n; ++i) {
                tokens[i] = protocol::derive_token(seeds[i], slot);
            }
            token_slot = slot;
            tokens_valid = true;
        }

        for (std::size_t i = 0; i < n; ++i) {
            pos[i] = cfg.agents[i].trajectory.position_at(static_cast<double>(t));
        }
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j) continue;
                const double d = std::hypot(pos[i][0] - pos[j][0], pos[i][1] - pos[j][1]);
                if (d > cfg.radio_range_m) continue;
                // Receiver i hears transmitter j; the offset models j's
                // hardware bias.
                const double rss = rss_at(cfg.channel, std::max(d, kMinSynthDistanceM), rng) +
                                   world.offsets[j];
                const auto verdict = classifier.classify(rss);
                world.stores[i].record_encounter(tokens[j], rss, t, verdict);
            }
        }

        while (next_event < events.size() && events[next_event].t_s <= t) {
            world.handle_diagnosis(agent_index(events[next_event].agent), t);
            ++next_event;
        }
    }
    while (next_event < events.size()) {
        world.handle_diagnosis(agent_index(events[next_event].agent), cfg.duration_s);
        ++next_event;
    }

    const auto truth = ground_truth_contacts(cfg.agents, cfg.cutoff_m, cfg.risk_threshold_s,
                                             cfg.duration_s, cfg.scan_interval_s);

    SimMetrics metrics;
    metrics.candidate_pairs = world.candidate;
    metrics.alerted_pairs = world.alerted;
    for (const auto& key : truth) {
        if (world.candidate.count(key) != 0) {
            metrics.true_contact_pairs.insert(key);
        }
    }

    std::size_t hits = 0;
    for (const auto& key : metrics.alerted_pairs) {
        if (metrics.true_contact_pairs.count(key) != 0) {
            ++hits;
        }
    }
    std::size_t negatives = 0;
    std::size_t true_negatives = 0;
    for (const auto& key : metrics.candidate_pairs) {
        if (metrics.true_contact_pairs.count(key) != 0) continue;
        ++negatives;
        if (metrics.alerted_pairs.count(key) == 0) {
            ++true_negatives;
        }
    }
    metrics.sensitivity =
        metrics.true_contact_pairs.empty()
            ? 1.0
            : static_cast<double>(hits) / static_cast<double>(metrics.true_contact_pairs.size());
    metrics.specificity = negatives == 0 ? 1.0
                                         : static_cast<double>(true_negatives) /
                                               static_cast<double>(negatives);

    metrics.detail.reserve(metrics.candidate_pairs.size());
    for (const auto& key : metrics.candidate_pairs) {
        PairDetail row;
        row.key = key;
        row.true_contact = metrics.true_contact_pairs.count(key) != 0;
        row.alerted = metrics.alerted_pairs.count(key) != 0;
        if (auto it = world.cumulative.find(key); it != world.cumulative.end()) {
            row.cumulative_close_s = it->second;
        }
        metrics.detail.push_back(std::move(row));
    }
    return metrics;
}

std::string SimMetrics::report(const ScenarioConfig& cfg) const {
    char buf[64];
    std::ostringstream os;
    os << "mode = " << protocol::to_string(cfg.mode) << '\n';
    os << "agents = " << cfg.agents.size() << '\n';
    os << "duration_s = " << cfg.duration_s << '\n';
    os << "scan_interval_s = " << cfg.scan_interval_s << '\n';
    os << "rng_seed = " << cfg.rng_seed << '\n';
    std::snprintf(buf, sizeof buf, "%.6g", cfg.channel.sigma_dbm);
    os << "channel_sigma_dbm = " << buf << '\n';
    os << "candidate_pair_days = " << candidate_pairs.size() << '\n';
    os << "true_contact_pair_days = " << true_contact_pairs.size() << '\n';
    os << "alerted_pair_days = " << alerted_pairs.size() << '\n';
    std::snprintf(buf, sizeof buf, "%.6f", sensitivity);
    os << "sensitivity = " << buf << '\n';
    std::snprintf(buf, sizeof buf, "%.6f", specificity);
    os << "specificity = " << buf << '\n';
    return os.str();
}

void SimMetrics::write_pair_table(std::ostream& out) const {
    out << "agent_a,agent_b,day,true_contact,alerted,cumulative_close_s\n";
    for (const auto& row : detail) {
        out << row.key.a << ',' << row.key.b << ',' << row.key.day << ','
            << (row.true_contact ? 1 : 0) << ',' << (row.alerted ? 1 : 0) << ','
            << row.cumulative_close_s << '\n';
    }
}

} // namespace proxtrace::sim

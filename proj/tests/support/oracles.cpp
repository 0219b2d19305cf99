#include "support/oracles.hpp"

#include "proxtrace/protocol/token.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <tuple>

namespace testsupport {

using namespace proxtrace;

namespace {

using classify::TrainingSet;
using classify::TreeNode;
using classify::TreeParams;
using ingest::ProximityLabel;

std::array<std::size_t, 2> count_by_scan(const TrainingSet& data,
                                         const std::vector<std::size_t>& idx) {
    std::array<std::size_t, 2> counts{0, 0};
    for (std::size_t i : idx) {
        if (data[i].label == ProximityLabel::close)
            ++counts[0];
        else
            ++counts[1];
    }
    return counts;
}

TreeNode build_exhaustive(const TrainingSet& data, const std::vector<std::size_t>& idx,
                          const TreeParams& params, std::size_t depth) {
    TreeNode node;
    node.class_counts = count_by_scan(data, idx);
    node.label =
        node.class_counts[0] >= node.class_counts[1] ? ProximityLabel::close : ProximityLabel::far;

    const bool pure = node.class_counts[0] == 0 || node.class_counts[1] == 0;
    if (pure || depth >= params.max_depth || idx.size() < 2 * params.min_leaf) return node;

    bool found = false;
    std::size_t best_feature = 0;
    double best_threshold = 0.0;
    double best_gain = 0.0;

    for (std::size_t f = 0; f < ingest::FeatureVector::kFeatureCount; ++f) {
        std::set<double> distinct;
        for (std::size_t i : idx) distinct.insert(data[i].features.as_array()[f]);
        auto it = distinct.begin();
        if (it == distinct.end()) continue;
        double prev = *it;
        for (++it; it != distinct.end(); prev = *it, ++it) {
            const double thr = (prev + *it) / 2.0;
            std::size_t lc = 0;
            std::size_t lf = 0;
            std::size_t rc = 0;
            std::size_t rf = 0;
            for (std::size_t i : idx) {
                const bool close = data[i].label == ProximityLabel::close;
                if (data[i].features.as_array()[f] <= thr) {
                    ++(close ? lc : lf);
                } else {
                    ++(close ? rc : rf);
                }
            }
            if (lc + lf < params.min_leaf || rc + rf < params.min_leaf) continue;
            const double gain = classify::split_gain(lc, lf, rc, rf);
            if (gain <= 0.0 || gain < params.min_impurity_decrease) continue;
            if (gain > best_gain) {
                found = true;
                best_feature = f;
                best_threshold = thr;
                best_gain = gain;
            }
        }
    }
    if (!found) return node;

    std::vector<std::size_t> left_idx;
    std::vector<std::size_t> right_idx;
    for (std::size_t i : idx) {
        if (data[i].features.as_array()[best_feature] <= best_threshold)
            left_idx.push_back(i);
        else
            right_idx.push_back(i);
    }
    node.feature_index = best_feature;
    node.threshold = best_threshold;
    node.left =
        std::make_unique<TreeNode>(build_exhaustive(data, left_idx, params, depth + 1));
    node.right =
        std::make_unique<TreeNode>(build_exhaustive(data, right_idx, params, depth + 1));
    return node;
}

} // namespace

TreeNode exhaustive_cart(const TrainingSet& data, const TreeParams& params) {
    std::vector<std::size_t> idx(data.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    return build_exhaustive(data, idx, params, 0);
}

TrainingSet random_training_set(std::mt19937_64& rng, std::size_t n) {
    // Values live on coarse dyadic grids (steps of 2.5, 0.75, 1.0) so every
    // candidate midpoint is exactly representable.
    TrainingSet out;
    out.reserve(n);
    std::uniform_int_distribution<int> mean_step(0, 16);
    std::uniform_int_distribution<int> std_step(0, 7);
    std::uniform_int_distribution<int> spread(0, 9);
    std::uniform_int_distribution<int> count(1, 20);
    std::uniform_int_distribution<int> pos(0, 5);
    std::uniform_real_distribution<double> drift(-5.0, 5.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t k = 0; k < n; ++k) {
        classify::TrainingPoint p;
        p.features.rss_mean_dbm = -90.0 + 2.5 * mean_step(rng);
        p.features.rss_std_dbm = 0.75 * std_step(rng);
        p.features.rss_min_dbm = p.features.rss_mean_dbm - spread(rng);
        p.features.rss_max_dbm = p.features.rss_mean_dbm + spread(rng);
        p.features.sample_count = static_cast<std::size_t>(count(rng));
        p.features.position_code = pos(rng);
        const bool strong = p.features.rss_mean_dbm + drift(rng) >= -72.5;
        bool close = strong;
        if (unit(rng) < 0.1) close = !close;   // label noise
        p.label = close ? ProximityLabel::close : ProximityLabel::far;
        out.push_back(p);
    }
    return out;
}

sim::PathLossModel normal_equations_fit(const std::vector<ingest::RssSample>& samples) {
    // Uncentered normal equations solved with Cramer's rule.
    const double n = static_cast<double>(samples.size());
    double sx = 0.0;
    double sy = 0.0;
    double sxx = 0.0;
    double sxy = 0.0;
    for (const auto& s : samples) {
        const double x = 10.0 * std::log10(s.distance_m);
        sx += x;
        sy += s.rss_dbm;
        sxx += x * x;
        sxy += x * s.rss_dbm;
    }
    const double det = n * sxx - sx * sx;
    const double a = (sy * sxx - sx * sxy) / det;
    const double b = (n * sxy - sx * sy) / det;

    sim::PathLossModel model;
    model.p0_dbm = a;
    model.n_exp = -b;
    double ss_res = 0.0;
    for (const auto& s : samples) {
        const double x = 10.0 * std::log10(s.distance_m);
        const double r = s.rss_dbm - (a + b * x);
        ss_res += r * r;
    }
    model.sigma_dbm = std::sqrt(ss_res / n);
    return model;
}

std::set<sim::PairKey> brute_force_alerts(const sim::ScenarioConfig& cfg,
                                          const sim::Classifier& cls) {
    const std::size_t n = cfg.agents.size();
    // Per (receiver, transmitter): when each token was last sighted, for the
    // merge-gap rule.
    std::vector<std::vector<std::map<protocol::Token, std::int64_t>>> last_seen(
        n, std::vector<std::map<protocol::Token, std::int64_t>>(n));
    // Accumulated close seconds per (receiver, transmitter, token day).
    std::map<std::tuple<std::size_t, std::size_t, std::int64_t>, std::uint32_t> close_s;

    std::vector<sim::DiagnosisEvent> events = cfg.diagnoses;
    std::stable_sort(events.begin(), events.end(),
                     [](const auto& a, const auto& b) { return a.t_s < b.t_s; });
    auto agent_index = [&](const protocol::DeviceId& id) {
        for (std::size_t i = 0; i < n; ++i)
            if (cfg.agents[i].id == id) return i;
        return n;
    };

    std::set<sim::PairKey> alerted;
    auto snapshot = [&](std::size_t diag) {
        for (std::size_t x = 0; x < n; ++x) {
            if (x == diag) continue;
            for (const auto& [key, secs] : close_s) {
                const auto& [receiver, transmitter, day] = key;
                if (receiver != x || transmitter != diag) continue;
                if (secs >= cfg.risk_threshold_s)
                    alerted.insert(sim::make_pair_key(cfg.agents[diag].id, cfg.agents[x].id, day));
            }
        }
    };

    std::size_t next_event = 0;
    for (std::int64_t t = 0; t < cfg.duration_s; t += cfg.scan_interval_s) {
        const std::int64_t day = protocol::day_of(t);
        const std::uint32_t slot = protocol::slot_of(t, cfg.rotation_period_s);
        std::vector<protocol::Token> tokens(n);
        std::vector<std::array<double, 2>> pos(n);
        for (std::size_t i = 0; i < n; ++i) {
            tokens[i] = protocol::derive_token(
                protocol::make_seed(cfg.rng_seed, i, static_cast<std::uint64_t>(day)), slot);
            pos[i] = cfg.agents[i].trajectory.position_at(static_cast<double>(t));
        }
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j) continue;
                const double d = std::hypot(pos[i][0] - pos[j][0], pos[i][1] - pos[j][1]);
                if (d > cfg.radio_range_m) continue;
                const double rss = sim::mean_rss_at(cfg.channel, std::max(d, 0.05));
                const bool close = cls.classify(rss) == ingest::ProximityLabel::close;
                auto& seen = last_seen[i][j];
                const auto it = seen.find(tokens[j]);
                const bool merged = it != seen.end() && t - it->second <= cfg.merge_gap_s;
                if (merged && close)
                    close_s[{i, j, day}] += static_cast<std::uint32_t>(cfg.scan_interval_s);
                seen[tokens[j]] = t;
            }
        }
        while (next_event < events.size() && events[next_event].t_s <= t) {
            snapshot(agent_index(events[next_event].agent));
            ++next_event;
        }
    }
    while (next_event < events.size()) {
        snapshot(agent_index(events[next_event].agent));
        ++next_event;
    }
    return alerted;
}

sim::ScenarioConfig random_world(std::uint64_t seed) {
    std::mt19937_64 rng(seed ^ 0x77eeddccbbaa0099ULL);
    sim::ScenarioConfig cfg;
    cfg.scan_interval_s = 60;
    cfg.duration_s = std::uniform_int_distribution<std::int64_t>(1, 3)(rng) *
                     protocol::kSecondsPerDay;
    cfg.retention_days = 14;
    cfg.risk_threshold_s =
        static_cast<std::uint32_t>(std::uniform_int_distribution<int>(10, 30)(rng)) * 60;
    cfg.channel = {-60.0, 2.0, 0.0};
    cfg.rng_seed = seed;
    cfg.mode = (rng() & 1) != 0 ? protocol::Mode::centralized : protocol::Mode::decentralized;
    const std::array<int, 3> rotations{900, 1800, 3600};
    cfg.rotation_period_s = rotations[rng() % rotations.size()];
    const std::array<int, 3> gaps{60, 300, 600};
    cfg.merge_gap_s = gaps[rng() % gaps.size()];

    const std::size_t n_agents = 2 + rng() % 5;
    std::uniform_real_distribution<double> field(0.0, 30.0);
    std::uniform_real_distribution<double> near_hub(-1.5, 1.5);
    std::uniform_int_distribution<int> n_waypoints(2, 5);
    for (std::size_t i = 0; i < n_agents; ++i) {
        sim::AgentSpec agent;
        agent.id = "a" + std::to_string(i);
        const bool clustered = (rng() & 1) != 0;
        const int k = n_waypoints(rng);
        for (int w = 0; w < k; ++w) {
            sim::Waypoint p;
            p.t_s = static_cast<double>(cfg.duration_s) * w / (k - 1);
            if (clustered) {
                p.x_m = 15.0 + near_hub(rng);
                p.y_m = 15.0 + near_hub(rng);
            } else {
                p.x_m = field(rng);
                p.y_m = field(rng);
            }
            agent.trajectory.points.push_back(p);
        }
        cfg.agents.push_back(std::move(agent));
    }

    const std::size_t n_events = 1 + rng() % 2;
    for (std::size_t e = 0; e < n_events; ++e) {
        sim::DiagnosisEvent ev;
        ev.agent = cfg.agents[rng() % n_agents].id;
        ev.t_s = std::uniform_int_distribution<std::int64_t>(0, cfg.duration_s)(rng);
        cfg.diagnoses.push_back(ev);
    }
    return cfg;
}

} // namespace testsupport

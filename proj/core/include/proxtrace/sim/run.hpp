#pragma once

#include "proxtrace/classify/tree.hpp"
#include "proxtrace/sim/scenario.hpp"

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace proxtrace::sim {

/// Labels one synthesized RSS observation close or far.
class Classifier {
public:
    virtual ~Classifier() = default;
    virtual ingest::ProximityLabel classify(double rss_dbm) const = 0;
};

/// Naive rule: close iff rss >= cutoff.
class ThresholdClassifier : public Classifier {
public:
    explicit ThresholdClassifier(double cutoff_dbm) : cutoff_dbm_(cutoff_dbm) {}
    ingest::ProximityLabel classify(double rss_dbm) const override;
    double cutoff_dbm() const { return cutoff_dbm_; }

private:
    double cutoff_dbm_;
};

/// Runs a trained decision tree on single-sample features. Simulated
/// agents carry no carrying-position ground truth, so one fixed position
/// code (default HH) is fed to the tree.
class TreeClassifier : public Classifier {
public:
    explicit TreeClassifier(classify::TreeNode tree,
                            ingest::PositionPair position = ingest::PositionPair::HH);
    ingest::ProximityLabel classify(double rss_dbm) const override;

private:
    classify::TreeNode tree_;
    ingest::PositionPair position_;
};

/// Builds the classifier a scenario asks for. A threshold spec without an
/// explicit cutoff resolves to the channel's mean RSS at cfg.cutoff_m; a
/// tree spec loads the model file. Throws errc::io_error / the tree
/// parser's errors on a bad model file.
std::unique_ptr<Classifier> make_classifier(const ScenarioConfig& cfg);

/// An unordered agent pair on one simulated day (a < b lexicographically).
struct PairKey {
    protocol::DeviceId a;
    protocol::DeviceId b;
    std::int64_t day = 0;

    auto operator<=>(const PairKey&) const = default;
};

PairKey make_pair_key(const protocol::DeviceId& x, const protocol::DeviceId& y,
                      std::int64_t day);

struct PairDetail {
    PairKey key;
    bool true_contact = false;
    bool alerted = false;
    std::uint32_t cumulative_close_s = 0;

    bool operator==(const PairDetail&) const = default;
};

/// Alert quality of one run. The evaluation universe (`candidate_pairs`)
/// is every pair-day that could possibly alert: pairs containing a
/// diagnosed agent, on days up to that agent's report day and within the
/// retention window. true_contact_pairs is the geometric ground truth
/// restricted to that universe; alerted_pairs is what the protocol path
/// actually flagged. Sensitivity and specificity follow, with the
/// convention that an empty denominator scores 1.0.
struct SimMetrics {
    std::set<PairKey> true_contact_pairs;
    std::set<PairKey> alerted_pairs;
    std::set<PairKey> candidate_pairs;
    double sensitivity = 1.0;
    double specificity = 1.0;
    std::vector<PairDetail> detail;   // one row per candidate pair-day, sorted

    bool operator==(const SimMetrics&) const = default;

    /// Key-value summary block, deterministic formatting.
    std::string report(const ScenarioConfig& cfg) const;

    /// Delimited table: agent_a,agent_b,day,true_contact,alerted,cumulative_close_s
    void write_pair_table(std::ostream& out) const;
};

/// Geometric ground truth over all pairs: pair-days whose cumulative time
/// at distance <= cutoff_m (sampled every scan_interval_s over
/// [0, duration_s)) reaches min_duration_s.
std::set<PairKey> ground_truth_contacts(const std::vector<AgentSpec>& agents, double cutoff_m,
                                        std::uint32_t min_duration_s, std::int64_t duration_s,
                                        int scan_interval_s);

/// Steps the world at scan_interval_s: every ordered pair within radio
/// range exchanges one synthesized RSS sample, the classifier labels it
/// and the receiver's store records it; stores purge at day rollover;
/// diagnosis events run the configured protocol path end to end. Two runs
/// with an equal config produce identical metrics.
SimMetrics run_scenario(const ScenarioConfig& cfg, const Classifier& classifier);

} // namespace proxtrace::sim

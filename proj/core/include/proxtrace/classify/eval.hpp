#pragma once

#include "proxtrace/classify/tree.hpp"
#include "proxtrace/ingest/sample.hpp"

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace proxtrace::classify {

struct EvalReport {
    double accuracy = 0.0;
    // confusion[true][pred], index 0 = close, 1 = far
    std::array<std::array<std::size_t, 2>, 2> confusion{{{0, 0}, {0, 0}}};
    double false_negative_rate = 0.0;   // close predicted far, over true close
    std::size_t n_test = 0;

    std::size_t true_close() const { return confusion[0][0] + confusion[0][1]; }
    std::size_t false_negatives() const { return confusion[0][1]; }

    /// Structured-text form: {"combination", "accuracy", "fn_rate",
    /// "confusion", "n_test"}.
    std::string to_json(const std::string& combination) const;
};

EvalReport evaluate(const TreeNode& tree, const TrainingSet& test);

/// Same report for the naive RSS threshold applied to rss_mean_dbm.
EvalReport evaluate_baseline(const TrainingSet& test, double cutoff_dbm);

/// Naive single-threshold rule: close iff rss >= cutoff.
ingest::ProximityLabel threshold_baseline(double rss_dbm, double cutoff_dbm);

/// Samples that are physically close (distance <= cutoff_m) yet read below
/// the RSS cutoff, so the naive rule misses them.
std::size_t baseline_false_negatives(const std::vector<ingest::RssSample>& samples,
                                     double cutoff_dbm, double cutoff_m);

} // namespace proxtrace::classify

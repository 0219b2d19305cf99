#include "proxtrace/classify/eval.hpp"

#include "proxtrace/error.hpp"

#include <cstdio>
#include <sstream>

namespace proxtrace::classify {

namespace {

EvalReport report_from_confusion(std::array<std::array<std::size_t, 2>, 2> confusion) {
    EvalReport r;
    r.confusion = confusion;
    r.n_test = confusion[0][0] + confusion[0][1] + confusion[1][0] + confusion[1][1];
    r.accuracy = static_cast<double>(confusion[0][0] + confusion[1][1]) /
                 static_cast<double>(r.n_test);
    const std::size_t close_total = confusion[0][0] + confusion[0][1];
    r.false_negative_rate =
        close_total == 0 ? 0.0
                         : static_cast<double>(confusion[0][1]) / static_cast<double>(close_total);
    return r;
}

std::size_t label_idx(ProximityLabel l) { return l == ProximityLabel::close ? 0 : 1; }

} // namespace

std::string EvalReport::to_json(const std::string& combination) const {
    char acc[32];
    char fn[32];
    std::snprintf(acc, sizeof(acc), "%.6f", accuracy);
    std::snprintf(fn, sizeof(fn), "%.6f", false_negative_rate);
    std::ostringstream out;
    out << R"({"combination": ")" << combination << R"(", "accuracy": )" << acc
        << R"(, "fn_rate": )" << fn << R"(, "confusion": [[)" << confusion[0][0] << ", "
        << confusion[0][1] << "], [" << confusion[1][0] << ", " << confusion[1][1]
        << R"(]], "n_test": )" << n_test << "}";
    return out.str();
}

EvalReport evaluate(const TreeNode& tree, const TrainingSet& test) {
    if (test.empty()) raise(errc::empty_test_set, "cannot evaluate on an empty set");
    std::array<std::array<std::size_t, 2>, 2> confusion{{{0, 0}, {0, 0}}};
    for (const auto& p : test)
        ++confusion[label_idx(p.label)][label_idx(predict(tree, p.features))];
    return report_from_confusion(confusion);
}

EvalReport evaluate_baseline(const TrainingSet& test, double cutoff_dbm) {
    if (test.empty()) raise(errc::empty_test_set, "cannot evaluate on an empty set");
    std::array<std::array<std::size_t, 2>, 2> confusion{{{0, 0}, {0, 0}}};
    for (const auto& p : test)
        ++confusion[label_idx(p.label)]
                   [label_idx(threshold_baseline(p.features.rss_mean_dbm, cutoff_dbm))];
    return report_from_confusion(confusion);
}

ingest::ProximityLabel threshold_baseline(double rss_dbm, double cutoff_dbm) {
    return rss_dbm >= cutoff_dbm ? ingest::ProximityLabel::close : ingest::ProximityLabel::far;
}

std::size_t baseline_false_negatives(const std::vector<ingest::RssSample>& samples,
                                     double cutoff_dbm, double cutoff_m) {
    std::size_t count = 0;
    for (const auto& s : samples)
        if (s.distance_m <= cutoff_m && s.rss_dbm < cutoff_dbm) ++count;
    return count;
}

} // namespace proxtrace::classify

#pragma once

#include "proxtrace/ingest/sample.hpp"

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace proxtrace::ingest {

/// Summary statistics of one RSS window, the classifier input.
struct FeatureVector {
    double rss_mean_dbm = 0.0;
    double rss_std_dbm = 0.0;   // population std over the window
    double rss_min_dbm = 0.0;
    double rss_max_dbm = 0.0;
    std::size_t sample_count = 1;
    int position_code = 0;      // underlying value of PositionPair

    static constexpr std::size_t kFeatureCount = 6;
    static const std::array<const char*, kFeatureCount>& feature_names();

    std::array<double, kFeatureCount> as_array() const {
        return {rss_mean_dbm, rss_std_dbm, rss_min_dbm, rss_max_dbm,
                static_cast<double>(sample_count), static_cast<double>(position_code)};
    }
};

/// Builds the single-sample feature vector used when classifying one scan.
FeatureVector single_sample_features(double rss_dbm, PositionPair position = PositionPair::HH);

struct LabeledWindow {
    FeatureVector features;
    ProximityLabel label = ProximityLabel::far;
    // Stratum metadata carried along for stratified splitting and
    // per-combination training.
    double distance_m = 0.0;
    PositionPair position_pair = PositionPair::HH;
    std::string session_id;
};

/// Windowing mode. Windows are non-overlapping and in time order when
/// timestamps are available and window_s > 0; otherwise consecutive
/// fixed-count chunks of window_n samples. window_n = 1 gives per-sample
/// features.
struct WindowSpec {
    double window_s = 5.0;
    std::size_t window_n = 1;

    static WindowSpec per_sample() { return {0.0, 1}; }
    static WindowSpec by_time(double seconds) { return {seconds, 1}; }
    static WindowSpec by_count(std::size_t n) { return {0.0, n}; }
};

/// Windows one stratum. All samples must share one (session, distance,
/// position) — errc::mixed_strata otherwise. Each window is labeled from
/// the stratum's ground-truth distance at `cutoff_m`.
std::vector<LabeledWindow> window_features(const std::vector<RssSample>& samples,
                                           const WindowSpec& spec, double cutoff_m);

/// Groups samples into (session, distance, position) strata and windows
/// each. Stratum order is sorted, so output order is deterministic.
std::vector<LabeledWindow> window_all(const std::vector<RssSample>& samples,
                                      const WindowSpec& spec, double cutoff_m);

} // namespace proxtrace::ingest

#include "proxtrace/ingest/features.hpp"

#include "proxtrace/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

namespace proxtrace::ingest {

const std::array<const char*, FeatureVector::kFeatureCount>& FeatureVector::feature_names() {
    static const std::array<const char*, kFeatureCount> names = {
        "rss_mean_dbm", "rss_std_dbm", "rss_min_dbm", "rss_max_dbm", "sample_count",
        "position_code"};
    return names;
}

FeatureVector single_sample_features(double rss_dbm, PositionPair position) {
    FeatureVector f;
    f.rss_mean_dbm = rss_dbm;
    f.rss_std_dbm = 0.0;
    f.rss_min_dbm = rss_dbm;
    f.rss_max_dbm = rss_dbm;
    f.sample_count = 1;
    f.position_code = static_cast<int>(position);
    return f;
}

namespace {

FeatureVector summarize(const std::vector<const RssSample*>& window) {
    FeatureVector f;
    double sum = 0.0;
    double sumsq = 0.0;
    f.rss_min_dbm = window.front()->rss_dbm;
    f.rss_max_dbm = window.front()->rss_dbm;
    for (const RssSample* s : window) {
        sum += s->rss_dbm;
        sumsq += s->rss_dbm * s->rss_dbm;
        f.rss_min_dbm = std::min(f.rss_min_dbm, s->rss_dbm);
        f.rss_max_dbm = std::max(f.rss_max_dbm, s->rss_dbm);
    }
    const auto n = static_cast<double>(window.size());
    f.rss_mean_dbm = sum / n;
    const double var = std::max(0.0, sumsq / n - f.rss_mean_dbm * f.rss_mean_dbm);
    f.rss_std_dbm = std::sqrt(var);
    f.sample_count = window.size();
    f.position_code = static_cast<int>(window.front()->position_pair);
    return f;
}

} // namespace

std::vector<LabeledWindow> window_features(const std::vector<RssSample>& samples,
                                           const WindowSpec& spec, double cutoff_m) {
    std::vector<LabeledWindow> out;
    if (samples.empty()) return out;
    if (spec.window_s <= 0 && spec.window_n == 0)
        raise(errc::config_invalid, "window spec needs window_s > 0 or window_n >= 1");

    const auto& first = samples.front();
    for (const auto& s : samples) {
        if (s.session_id != first.session_id || s.distance_m != first.distance_m ||
            s.position_pair != first.position_pair)
            raise(errc::mixed_strata,
                  "window_features input spans multiple (session, distance, position) strata");
    }

    const bool have_time =
        spec.window_s > 0 &&
        std::all_of(samples.begin(), samples.end(), [](const RssSample& s) { return s.t_offset_s.has_value(); });

    std::vector<std::vector<const RssSample*>> windows;
    if (have_time) {
        std::vector<const RssSample*> ordered;
        ordered.reserve(samples.size());
        for (const auto& s : samples) ordered.push_back(&s);
        std::stable_sort(ordered.begin(), ordered.end(), [](const RssSample* a, const RssSample* b) {
            return *a->t_offset_s < *b->t_offset_s;
        });
        const double t0 = *ordered.front()->t_offset_s;
        for (const RssSample* s : ordered) {
            const auto idx = static_cast<std::size_t>((*s->t_offset_s - t0) / spec.window_s);
            if (windows.size() <= idx) windows.resize(idx + 1);
            windows[idx].push_back(s);
        }
    } else {
        const std::size_t n = std::max<std::size_t>(1, spec.window_n);
        for (std::size_t i = 0; i < samples.size(); i += n) {
            std::vector<const RssSample*> w;
            for (std::size_t j = i; j < std::min(i + n, samples.size()); ++j)
                w.push_back(&samples[j]);
            windows.push_back(std::move(w));
        }
    }

    for (const auto& w : windows) {
        if (w.empty()) continue;   // gaps in the time grid produce no window
        LabeledWindow lw;
        lw.features = summarize(w);
        lw.label = label_distance(first.distance_m, cutoff_m);
        lw.distance_m = first.distance_m;
        lw.position_pair = first.position_pair;
        lw.session_id = first.session_id;
        out.push_back(std::move(lw));
    }
    return out;
}

std::vector<LabeledWindow> window_all(const std::vector<RssSample>& samples,
                                      const WindowSpec& spec, double cutoff_m) {
    using Key = std::tuple<std::string, double, int>;
    std::map<Key, std::vector<RssSample>> strata;
    for (const auto& s : samples)
        strata[{s.session_id, s.distance_m, static_cast<int>(s.position_pair)}].push_back(s);

    std::vector<LabeledWindow> out;
    for (const auto& [key, group] : strata) {
        auto windows = window_features(group, spec, cutoff_m);
        out.insert(out.end(), std::make_move_iterator(windows.begin()),
                   std::make_move_iterator(windows.end()));
    }
    return out;
}

} // namespace proxtrace::ingest

// Hot paths of the classification pipeline: CART training at realistic
// dataset sizes, single-sample prediction, and windowed featurization.

#include "proxtrace/classify/tree.hpp"
#include "proxtrace/ingest/features.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

using namespace proxtrace;

namespace {

classify::TrainingSet synthetic_points(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 3.0);
    std::uniform_real_distribution<double> dist(0.2, 5.0);
    classify::TrainingSet points;
    points.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = dist(rng);
        classify::TrainingPoint p;
        p.features.rss_mean_dbm = -58.0 - 20.0 * std::log10(d) + noise(rng);
        p.features.rss_std_dbm = std::abs(noise(rng)) * 0.5;
        p.features.rss_min_dbm = p.features.rss_mean_dbm - 4.0;
        p.features.rss_max_dbm = p.features.rss_mean_dbm + 4.0;
        p.features.sample_count = 1 + (rng() % 30);
        p.features.position_code = int(rng() % 6);
        p.label = d <= 2.0 ? ingest::ProximityLabel::close : ingest::ProximityLabel::far;
        points.push_back(std::move(p));
    }
    return points;
}

void bm_train_tree(benchmark::State& state) {
    const auto data = synthetic_points(std::size_t(state.range(0)), 99);
    classify::TreeParams params;
    params.max_depth = 8;
    params.min_leaf = 5;
    for (auto _ : state) {
        auto tree = classify::train_tree(data, params);
        benchmark::DoNotOptimize(tree.class_counts);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bm_train_tree)->Arg(1000)->Arg(10000)->Arg(50000);

void bm_predict(benchmark::State& state) {
    const auto data = synthetic_points(20000, 7);
    classify::TreeParams params;
    const auto tree = classify::train_tree(data, params);
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(classify::predict(tree, data[i % data.size()].features));
        ++i;
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bm_predict);

void bm_window_features(benchmark::State& state) {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> noise(0.0, 3.0);
    std::vector<ingest::RssSample> samples(std::size_t(state.range(0)));
    for (std::size_t i = 0; i < samples.size(); ++i) {
        auto& s = samples[i];
        s.rss_dbm = -70.0 + noise(rng);
        s.distance_m = 1.0;
        s.session_id = "s" + std::to_string(i % 8);
        s.t_offset_s = double(i);
    }
    const auto spec = ingest::WindowSpec::by_time(5.0);
    for (auto _ : state) {
        auto windows = ingest::window_all(samples, spec, 2.0);
        benchmark::DoNotOptimize(windows.size());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bm_window_features)->Arg(10000)->Arg(100000);

} // namespace

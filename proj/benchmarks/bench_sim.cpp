// Channel synthesis and whole-world simulation throughput.

#include "proxtrace/sim/channel.hpp"
#include "proxtrace/sim/run.hpp"
#include "proxtrace/sim/scenario.hpp"

#include <benchmark/benchmark.h>

#include <random>
#include <string>

using namespace proxtrace;

namespace {

void bm_rss_at(benchmark::State& state) {
    const sim::PathLossModel model{-60.0, 2.0, 3.0};
    std::mt19937_64 rng(1);
    double d = 0.3;
    for (auto _ : state) {
        benchmark::DoNotOptimize(sim::rss_at(model, d, rng));
        d += 0.1;
        if (d > 20.0) d = 0.3;
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bm_rss_at);

sim::ScenarioConfig crowd_world(int agents, std::int64_t duration_s) {
    sim::ScenarioConfig cfg;
    cfg.duration_s = duration_s;
    cfg.scan_interval_s = 5;
    cfg.rng_seed = 77;
    cfg.channel = {-60.0, 2.0, 2.0};
    for (int i = 0; i < agents; ++i) {
        sim::AgentSpec agent;
        agent.id = "a" + std::to_string(i);
        const double x = double(i % 5) * 3.0;
        const double y = double(i / 5) * 3.0;
        agent.trajectory.points = {{0.0, x, y}, {double(duration_s), y, x}};
        cfg.agents.push_back(std::move(agent));
    }
    cfg.diagnoses.push_back({"a0", duration_s});
    return cfg;
}

void bm_run_scenario(benchmark::State& state) {
    const auto cfg = crowd_world(int(state.range(0)), 3600);
    const auto classifier = sim::make_classifier(cfg);
    for (auto _ : state) {
        const auto metrics = sim::run_scenario(cfg, *classifier);
        benchmark::DoNotOptimize(metrics.alerted_pairs.size());
    }
    // Sightings per run: steps * ordered pairs (upper bound; range-limited).
    state.SetItemsProcessed(state.iterations() * (3600 / 5) * state.range(0) *
                            (state.range(0) - 1));
}
BENCHMARK(bm_run_scenario)->Arg(4)->Arg(10)->Arg(20);

} // namespace

BENCHMARK_MAIN();

// Token derivation, encounter recording, and payload codec throughput —
// the per-sighting costs a device pays continuously.

#include "proxtrace/protocol/payload.hpp"
#include "proxtrace/protocol/store.hpp"
#include "proxtrace/protocol/token.hpp"

#include <benchmark/benchmark.h>

#include <cstdint>

using namespace proxtrace;

namespace {

void bm_derive_token(benchmark::State& state) {
    const auto seed = protocol::make_seed(1, 2, 3);
    std::uint32_t slot = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(protocol::derive_token(seed, slot));
        slot = (slot + 1) % 96;
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bm_derive_token);

void bm_day_tokens(benchmark::State& state) {
    const auto seed = protocol::make_seed(4, 5, 6);
    for (auto _ : state) {
        auto tokens = protocol::day_tokens(seed, 900);
        benchmark::DoNotOptimize(tokens.size());
    }
    state.SetItemsProcessed(state.iterations() * 96);
}
BENCHMARK(bm_day_tokens);

void bm_record_encounter(benchmark::State& state) {
    const auto n = std::int64_t(state.range(0));
    for (auto _ : state) {
        state.PauseTiming();
        protocol::LocalStore store(14);
        state.ResumeTiming();
        for (std::int64_t t = 0; t < n; ++t) {
            const auto token =
                protocol::derive_token(protocol::make_seed(9, t % 4, 0), protocol::slot_of(t, 900));
            store.record_encounter(token, -68.0, t, ingest::ProximityLabel::close);
        }
        benchmark::DoNotOptimize(store.records().size());
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(bm_record_encounter)->Arg(1000)->Arg(10000);

void bm_payload_roundtrip(benchmark::State& state) {
    protocol::LocalStore store(14);
    for (std::int64_t t = 0; t < 5000; ++t)
        store.record_encounter(
            protocol::derive_token(protocol::make_seed(1, t % 16, 0), protocol::slot_of(t, 900)),
            -70.0, t, ingest::ProximityLabel::close);
    const auto key = protocol::default_seal_key();
    const auto payload =
        protocol::build_diagnosis_payload(store, protocol::Mode::centralized, true);
    for (auto _ : state) {
        const auto bytes = protocol::encode_payload(payload, key);
        const auto back = protocol::decode_payload(bytes, key);
        benchmark::DoNotOptimize(back.records.size());
    }
    state.SetItemsProcessed(state.iterations() * std::int64_t(payload.records.size()));
}
BENCHMARK(bm_payload_roundtrip);

} // namespace

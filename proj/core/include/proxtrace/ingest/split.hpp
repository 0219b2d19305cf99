#pragma once

#include "proxtrace/ingest/features.hpp"

#include <cstdint>
#include <vector>

namespace proxtrace::ingest {

struct SplitDataset {
    std::vector<LabeledWindow> train;
    std::vector<LabeledWindow> test;
    std::uint64_t split_seed = 0;
    double train_fraction = 0.8;
};

/// Deterministic stratified split. Strata are (distance, position_pair);
/// each stratum is shuffled with a generator derived from (seed, stratum
/// index over sorted keys) and cut at round(fraction * n), clamped so both
/// halves stay non-empty. Throws errc::empty_stratum when a stratum has
/// fewer than 2 windows.
SplitDataset split(const std::vector<LabeledWindow>& windows, double train_fraction,
                   std::uint64_t seed);

} // namespace proxtrace::ingest

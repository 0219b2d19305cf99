#include "proxtrace/ingest/split.hpp"

#include "proxtrace/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <tuple>

namespace proxtrace::ingest {

SplitDataset split(const std::vector<LabeledWindow>& windows, double train_fraction,
                   std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        raise(errc::config_invalid, "train_fraction must lie in (0, 1)");

    using Key = std::tuple<double, int>;
    std::map<Key, std::vector<std::size_t>> strata;
    for (std::size_t i = 0; i < windows.size(); ++i)
        strata[{windows[i].distance_m, static_cast<int>(windows[i].position_pair)}].push_back(i);

    SplitDataset out;
    out.split_seed = seed;
    out.train_fraction = train_fraction;

    std::uint64_t stratum_index = 0;
    for (auto& [key, indices] : strata) {
        if (indices.size() < 2)
            raise(errc::empty_stratum,
                  "stratum (distance " + std::to_string(std::get<0>(key)) + ", position code " +
                      std::to_string(std::get<1>(key)) + ") has fewer than 2 windows");

        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stratum_index),
                          static_cast<std::uint32_t>(stratum_index >> 32)};
        std::mt19937_64 rng(seq);
        std::shuffle(indices.begin(), indices.end(), rng);

        const auto n = indices.size();
        auto n_train = static_cast<std::size_t>(
            std::llround(train_fraction * static_cast<double>(n)));
        n_train = std::clamp<std::size_t>(n_train, 1, n - 1);

        for (std::size_t i = 0; i < n; ++i)
            (i < n_train ? out.train : out.test).push_back(windows[indices[i]]);
        ++stratum_index;
    }
    return out;
}

} // namespace proxtrace::ingest

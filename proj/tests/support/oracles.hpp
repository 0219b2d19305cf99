#pragma once

// Independent reference implementations used to cross-check the library.
// Each oracle recomputes a result with a different mechanical procedure
// than the production code (brute-force enumeration, raw normal equations,
// event-log replay) so agreement is meaningful.

#include "proxtrace/classify/tree.hpp"
#include "proxtrace/sim/channel.hpp"
#include "proxtrace/sim/run.hpp"
#include "proxtrace/sim/scenario.hpp"

#include <cstdint>
#include <random>
#include <set>
#include <vector>

namespace testsupport {

// --- CART oracle -----------------------------------------------------------
//
// Same stopping rules and tie order as the trainer, but every candidate
// threshold is evaluated by re-scanning the whole point set (no running
// counts, no sort-position bookkeeping). Gains go through
// classify::split_gain so equal splits score bit-identically.
proxtrace::classify::TreeNode exhaustive_cart(const proxtrace::classify::TrainingSet& data,
                                              const proxtrace::classify::TreeParams& params);

// Random training sets on a coarse value grid (so midpoints are exact) with
// optional label noise.
proxtrace::classify::TrainingSet random_training_set(std::mt19937_64& rng, std::size_t n);

// --- Path-loss fit oracle ----------------------------------------------------
//
// Solves the uncentered 2x2 normal equations with Cramer's rule instead of
// the centered-sums regression in the library.
proxtrace::sim::PathLossModel normal_equations_fit(
    const std::vector<proxtrace::ingest::RssSample>& samples);

// --- Protocol oracle ---------------------------------------------------------
//
// Replays a noiseless world (sigma = 0, no device offsets) from first
// principles: synthesize the same deterministic RSS values, segment each
// (receiver, transmitter) stream into encounter records by token rotation
// and merge gap, accrue close seconds, then decide alerts per diagnosed
// agent and day. Valid only while the run is shorter than the retention
// window (no purge) — random_world() respects that.
std::set<proxtrace::sim::PairKey> brute_force_alerts(const proxtrace::sim::ScenarioConfig& cfg,
                                                     const proxtrace::sim::Classifier& cls);

// Small random worlds for the property tests: 2..6 agents wandering a
// 30x30 m field for up to 3 days, 1..2 diagnoses, scan interval 60 s.
proxtrace::sim::ScenarioConfig random_world(std::uint64_t seed);

} // namespace testsupport

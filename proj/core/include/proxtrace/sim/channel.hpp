#pragma once

#include "proxtrace/ingest/sample.hpp"

#include <random>
#include <vector>

namespace proxtrace::sim {

/// Log-distance path loss with Gaussian shadowing:
///   rss(d) = p0_dbm - 10 * n_exp * log10(d) + N(0, sigma_dbm^2)
struct PathLossModel {
    double p0_dbm = -60.0;   // mean RSS at 1 m
    double n_exp = 2.0;      // path-loss exponent
    double sigma_dbm = 0.0;  // shadowing spread
};

/// Least-squares fit of (10*log10 d, rss) pairs; sigma is the population
/// standard deviation of the residuals. Throws errc::degenerate_distances
/// when the samples do not span two distinct distances.
PathLossModel fit_path_loss(const std::vector<ingest::RssSample>& samples);

/// Deterministic mean term p0 - 10 n log10(d).
double mean_rss_at(const PathLossModel& model, double distance_m);

/// One synthesized observation. Draws from `rng` only when sigma > 0, so a
/// noiseless channel is exactly the mean term. Throws
/// errc::nonpositive_distance for d <= 0.
double rss_at(const PathLossModel& model, double distance_m, std::mt19937_64& rng);

} // namespace proxtrace::sim

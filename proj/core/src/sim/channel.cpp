#include "proxtrace/sim/channel.hpp"

#include "proxtrace/error.hpp"

#include <cmath>

namespace proxtrace::sim {

PathLossModel fit_path_loss(const std::vector<ingest::RssSample>& samples) {
    if (samples.empty()) {
        raise(errc::degenerate_distances, "no samples to fit");
    }
    // Linear regression y = a + b x with x = 10 log10(d), y = rss; then
    // p0 = a, n = -b. Centered sums keep the arithmetic well conditioned.
    const std::size_t n = samples.size();
    double mean_x = 0.0;
    double mean_y = 0.0;
    for (const auto& s : samples) {
        if (s.distance_m <= 0.0) {
            raise(errc::nonpositive_distance, "distance must be positive to fit");
        }
        mean_x += 10.0 * std::log10(s.distance_m);
        mean_y += s.rss_dbm;
    }
    mean_x /= static_cast<double>(n);
    mean_y /= static_cast<double>(n);

    double sxx = 0.0;
    double sxy = 0.0;
    for (const auto& s : samples) {
        const double dx = 10.0 * std::log10(s.distance_m) - mean_x;
        const double dy = s.rss_dbm - mean_y;
        sxx += dx * dx;
        sxy += dx * dy;
    }
    if (sxx == 0.0) {
        raise(errc::degenerate_distances, "all samples share one distance");
    }

    const double slope = sxy / sxx;
    PathLossModel model;
    model.n_exp = -slope;
    model.p0_dbm = mean_y - slope * mean_x;

    double ss_res = 0.0;
    for (const auto& s : samples) {
        const double x = 10.0 * std::log10(s.distance_m);
        const double r = s.rss_dbm - (model.p0_dbm + slope * x);
        ss_res += r * r;
    }
    model.sigma_dbm = std::sqrt(ss_res / static_cast<double>(n));
    return model;
}

double mean_rss_at(const PathLossModel& model, double distance_m) {
    if (!(distance_m > 0.0)) {
        raise(errc::nonpositive_distance, "distance must be > 0");
    }
    return model.p0_dbm - 10.0 * model.n_exp * std::log10(distance_m);
}

double rss_at(const PathLossModel& model, double distance_m, std::mt19937_64& rng) {
    const double mean = mean_rss_at(model, distance_m);
    if (model.sigma_dbm <= 0.0) {
        return mean; // no draw: noiseless channels must not consume RNG state
    }
    std::normal_distribution<double> noise(0.0, model.sigma_dbm);
    return mean + noise(rng);
}

} // namespace proxtrace::sim

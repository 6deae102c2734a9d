#pragma once

#include <cstdint>
#include <optional>

#include "epictrl/dynamics.hpp"

namespace epictrl {

struct McResult {
    std::int64_t runs = 0;
    double mean_reach = 0.0;
    double stderr_mean = 0.0; // sample std / sqrt(runs)
    std::optional<std::vector<std::int64_t>> reach_histogram;
    std::uint64_t rng_seed = 0;
};

struct McParams {
    std::int64_t runs = 10000;
    std::uint64_t rng_seed = 12345;
    std::int32_t substeps = 4; // subdivisions of each grid cell
    std::int32_t histogram_bins = 0;
};

/// Stochastic SI jump-process oracle for the mean-field ODE. Each run seeds
/// node j infected with probability seed_prob[j], then advances on the
/// control grid subdivided `substeps` times; in each sub-interval a
/// susceptible node flips with probability 1 - exp(-hazard * delta) using
/// the interval-start hazard beta * (#infected neighbors) + u_{g(j)}(t).
/// Runs own independent SplitMix64 streams derived from (rng_seed, run), so
/// results are reproducible for any thread count.
McResult mc_simulate(const Network& net, const Grouping& grp, const ControlSchedule& ctrl,
                     std::span<const double> seed_prob, double beta, const McParams& params,
                     Exec exec = Exec::par);

} // namespace epictrl

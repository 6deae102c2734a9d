#include "epictrl/mc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "epictrl/rng.hpp"

namespace epictrl {

namespace {

/// One realization; returns the final infected fraction.
double run_once(const Network& net, const Grouping& grp, const ControlSchedule& ctrl,
                std::span<const double> seed_prob, double beta, std::int32_t substeps,
                SplitMix64 rng, std::vector<char>& infected,
                std::vector<std::int32_t>& infected_neighbors,
                std::vector<std::int32_t>& newly) {
    const std::int32_t n = net.node_count();
    infected.assign(n, 0);
    infected_neighbors.assign(n, 0);

    std::int32_t count = 0;
    for (std::int32_t j = 0; j < n; ++j)
        if (rng.uniform01() < seed_prob[j]) {
            infected[j] = 1;
            ++count;
        }
    for (std::int32_t j = 0; j < n; ++j)
        if (infected[j])
            for (std::int32_t w : net.neighbors(j)) ++infected_neighbors[w];

    const TimeGrid grid = ctrl.grid();
    const double delta = grid.dt() / substeps;
    for (std::int32_t k = 0; k < grid.steps && count < n; ++k) {
        auto u_lo = ctrl.slice(k);
        auto u_hi = ctrl.slice(k + 1);
        for (std::int32_t sub = 0; sub < substeps; ++sub) {
            // control at the sub-interval start, linear in the cell
            const double frac = static_cast<double>(sub) / substeps;
            newly.clear();
            for (std::int32_t j = 0; j < n; ++j) {
                if (infected[j]) continue;
                const std::int32_t m = grp.group_of(j);
                const double u = (1.0 - frac) * u_lo[m] + frac * u_hi[m];
                const double hazard = beta * infected_neighbors[j] + u;
                if (hazard <= 0.0) continue;
                if (rng.uniform01() < -std::expm1(-hazard * delta)) newly.push_back(j);
            }
            for (std::int32_t j : newly) {
                infected[j] = 1;
                ++count;
                for (std::int32_t w : net.neighbors(j)) ++infected_neighbors[w];
            }
        }
    }
    return static_cast<double>(count) / n;
}

} // namespace

McResult mc_simulate(const Network& net, const Grouping& grp, const ControlSchedule& ctrl,
                     std::span<const double> seed_prob, double beta, const McParams& params,
                     Exec exec) {
    const std::int32_t n = net.node_count();
    if (params.runs < 1) throw std::invalid_argument("mc: need at least one run");
    if (params.substeps < 1) throw std::invalid_argument("mc: need at least one substep");
    if (!(beta >= 0.0)) throw std::invalid_argument("mc: beta must be nonnegative");
    if (static_cast<std::int32_t>(seed_prob.size()) != n)
        throw std::invalid_argument("mc: seed length != node count");
    for (double v : seed_prob)
        if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("mc: seed outside [0,1]");
    validate_controls(ctrl);

    std::vector<double> reach(params.runs);
    if (exec == Exec::par) {
#pragma omp parallel
        {
            std::vector<char> infected;
            std::vector<std::int32_t> infected_neighbors, newly;
#pragma omp for schedule(dynamic, 8)
            for (std::int64_t r = 0; r < params.runs; ++r)
                reach[r] = run_once(net, grp, ctrl, seed_prob, beta, params.substeps,
                                    derive_stream(params.rng_seed, static_cast<std::uint64_t>(r)),
                                    infected, infected_neighbors, newly);
        }
    } else {
        std::vector<char> infected;
        std::vector<std::int32_t> infected_neighbors, newly;
        for (std::int64_t r = 0; r < params.runs; ++r)
            reach[r] = run_once(net, grp, ctrl, seed_prob, beta, params.substeps,
                                derive_stream(params.rng_seed, static_cast<std::uint64_t>(r)),
                                infected, infected_neighbors, newly);
    }

    double mean = 0.0;
    for (double v : reach) mean += v;
    mean /= static_cast<double>(params.runs);
    double varsum = 0.0;
    for (double v : reach) varsum += (v - mean) * (v - mean);
    const double sample_std =
        params.runs > 1 ? std::sqrt(varsum / static_cast<double>(params.runs - 1)) : 0.0;

    McResult result;
    result.runs = params.runs;
    result.mean_reach = mean;
    result.stderr_mean = sample_std / std::sqrt(static_cast<double>(params.runs));
    result.rng_seed = params.rng_seed;
    if (params.histogram_bins > 0) {
        std::vector<std::int64_t> bins(params.histogram_bins, 0);
        for (double v : reach) {
            auto b = static_cast<std::int32_t>(v * params.histogram_bins);
            ++bins[std::min(b, params.histogram_bins - 1)];
        }
        result.reach_histogram = std::move(bins);
    }
    return result;
}

} // namespace epictrl

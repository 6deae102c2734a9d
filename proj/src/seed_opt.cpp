#include "epictrl/seed_opt.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace epictrl {

SeedVector SeedVector::checked(std::vector<double> i0, std::span<const double> p, double budget) {
    if (i0.size() != p.size()) throw std::invalid_argument("seed vector: wrong group count");
    double total = 0.0;
    for (std::size_t m = 0; m < i0.size(); ++m) {
        if (!(i0[m] >= 0.0 && i0[m] <= 1.0))
            throw std::invalid_argument("seed vector: entries must lie in [0,1]");
        total += p[m] * i0[m];
    }
    if (std::abs(total - budget) > 1e-9)
        throw std::invalid_argument("seed vector: sum p_m i0_m = " + std::to_string(total) +
                                    " does not match budget " + std::to_string(budget));
    return SeedVector{std::move(i0), budget};
}

std::vector<double> expand_seed(const SeedVector& sv, const Grouping& grp) {
    if (static_cast<std::int32_t>(sv.i0.size()) != grp.group_count())
        throw std::invalid_argument("expand_seed: group count mismatch");
    std::vector<double> node_seed(grp.node_count());
    expand_to_nodes(grp, sv.i0, node_seed);
    return node_seed;
}

SeedVector project_seed(std::span<const double> raw, std::span<const double> p, double budget) {
    if (!(budget >= 0.0 && budget <= 1.0))
        throw std::invalid_argument("project_seed: budget must lie in [0,1]");
    const std::size_t M = raw.size();
    if (p.size() != M) throw std::invalid_argument("project_seed: size mismatch");

    auto clip = [](double v) { return std::clamp(v, 0.0, 1.0); };
    // h(theta) = sum p_m clip(raw_m + theta p_m) - budget, nondecreasing,
    // h(-inf) = -budget <= 0, h(+inf) = 1 - budget >= 0
    auto h = [&](double theta) {
        double total = -budget;
        for (std::size_t m = 0; m < M; ++m) total += p[m] * clip(raw[m] + theta * p[m]);
        return total;
    };

    // cap the expansion: past ~2^64 every coordinate is saturated at a box
    // face and h is constant, so a wider bracket cannot help
    double lo, hi;
    if (h(0.0) > 0.0) {
        hi = 0.0;
        lo = -1.0;
        for (int i = 0; i < 64 && h(lo) > 0.0; ++i) lo *= 2.0;
    } else {
        lo = 0.0;
        hi = 1.0;
        for (int i = 0; i < 64 && h(hi) < 0.0; ++i) hi *= 2.0;
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
        double mid = 0.5 * (lo + hi);
        (h(mid) < 0.0 ? lo : hi) = mid;
    }
    const double theta = 0.5 * (lo + hi);

    std::vector<double> x(M);
    for (std::size_t m = 0; m < M; ++m) x[m] = clip(raw[m] + theta * p[m]);
    // snap the residual onto the unclipped coordinates so the constraint
    // holds to machine precision
    double violation = -budget;
    double free_weight = 0.0;
    for (std::size_t m = 0; m < M; ++m) {
        violation += p[m] * x[m];
        if (x[m] > 0.0 && x[m] < 1.0) free_weight += p[m] * p[m];
    }
    if (free_weight > 0.0)
        for (std::size_t m = 0; m < M; ++m)
            if (x[m] > 0.0 && x[m] < 1.0) x[m] = std::clamp(x[m] - violation * p[m] / free_weight, 0.0, 1.0);

    return SeedVector{std::move(x), budget};
}

namespace {

double evaluate(const Network& net, const Grouping& grp, std::span<const double> i0, double beta,
                const CostModel& cost, const SweepParams& sweep_params, const TimeGrid& grid,
                Exec exec, SweepSolution* out = nullptr) {
    std::vector<double> node_seed(grp.node_count());
    expand_to_nodes(grp, i0, node_seed);
    SweepSolution sol = fbs_solve(net, grp, node_seed, beta, cost, sweep_params, grid, exec);
    double J = sol.report.J;
    if (out) *out = std::move(sol);
    return J;
}

} // namespace

JointSolution joint_optimize(const Network& net, const Grouping& grp, double budget, double beta,
                             const CostModel& cost, const SweepParams& sweep_params,
                             const TimeGrid& grid, const JointOptions& opts, Exec exec) {
    if (!(budget >= 0.0 && budget <= 1.0))
        throw std::invalid_argument("joint_optimize: seed budget must lie in [0,1]");
    const std::int32_t M = grp.group_count();

    // uniform start is always feasible: sum p_m * budget = budget
    std::vector<double> current(M, budget);
    int evaluations = 0;

    SweepSolution best_sol;
    double J_current = evaluate(net, grp, current, beta, cost, sweep_params, grid, exec, &best_sol);
    ++evaluations;
    std::vector<double> best_seed = current;
    double J_best = J_current;

    int outer_done = 0;
    bool converged = false;
    for (int outer = 0; outer < opts.max_outer_iterations && !converged; ++outer) {
        outer_done = outer + 1;

        // forward differences, one inner solve per group
        std::vector<double> gradient(M);
        for (std::int32_t m = 0; m < M; ++m) {
            std::vector<double> perturbed = current;
            double h = opts.fd_step;
            if (perturbed[m] + h > 1.0) h = -h; // backward difference at the box edge
            perturbed[m] += h;
            double J_pert = evaluate(net, grp, perturbed, beta, cost, sweep_params, grid, exec);
            ++evaluations;
            gradient[m] = (J_pert - J_current) / h;
        }

        double step = opts.initial_step;
        bool improved = false;
        for (int halving = 0; halving < opts.max_halvings; ++halving, step *= 0.5) {
            std::vector<double> candidate(M);
            for (std::int32_t m = 0; m < M; ++m) candidate[m] = current[m] + step * gradient[m];
            SeedVector trial = project_seed(candidate, cost.p, budget);
            SweepSolution sol;
            double J_trial =
                evaluate(net, grp, trial.i0, beta, cost, sweep_params, grid, exec, &sol);
            ++evaluations;
            if (J_trial > J_current) {
                const double gain = J_trial - J_current;
                current = trial.i0;
                J_current = J_trial;
                if (J_trial > J_best) {
                    J_best = J_trial;
                    best_seed = trial.i0;
                    best_sol = std::move(sol);
                }
                improved = true;
                converged = gain < opts.j_rel_tol * std::max(1.0, std::abs(J_current));
                break;
            }
        }
        if (!improved) break; // no ascent direction left at this resolution
    }

    JointSolution out;
    out.seeds = SeedVector{std::move(best_seed), budget};
    out.control = std::move(best_sol.control);
    out.state = std::move(best_sol.state);
    out.report = std::move(best_sol.report);
    out.outer_iterations = outer_done;
    out.evaluations = evaluations;
    return out;
}

} // namespace epictrl

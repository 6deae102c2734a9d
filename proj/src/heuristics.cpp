#include "epictrl/heuristics.hpp"

#include <cmath>
#include <functional>
#include <iostream>
#include <limits>
#include <stdexcept>

namespace epictrl {

ControlSchedule heuristic_schedule(HeuristicKind kind, double level, TimeGrid grid,
                                   std::int32_t groups) {
    ControlSchedule ctrl = constant_control(grid, groups, 0.0);
    const std::int32_t cutoff =
        kind == HeuristicKind::static_control ? grid.steps : grid.steps / 2;
    for (std::int32_t k = 0; k <= cutoff; ++k)
        for (double& v : ctrl.slice(k)) v = level;
    return ctrl;
}

namespace {

struct GoldenResult {
    double argmax = 0.0;
    double value = 0.0;
    int evaluations = 0;
    bool at_upper_bound = false;
};

/// Maximizes a unimodal f over [0, hi]: 8-interval coarse scan, then
/// golden-section on the surviving bracket.
GoldenResult golden_section_max(const std::function<double(double)>& f, double hi, double tol,
                                int max_evaluations) {
    GoldenResult result;
    constexpr int kScanIntervals = 8;
    double best_x = 0.0, best_f = -std::numeric_limits<double>::infinity();
    int best_i = 0;
    for (int i = 0; i <= kScanIntervals; ++i) {
        const double x = hi * i / kScanIntervals;
        const double fx = f(x);
        ++result.evaluations;
        if (fx > best_f) {
            best_f = fx;
            best_x = x;
            best_i = i;
        }
    }
    double a = hi * std::max(0, best_i - 1) / kScanIntervals;
    double b = hi * std::min(kScanIntervals, best_i + 1) / kScanIntervals;

    constexpr double inv_phi = 0.6180339887498949;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    result.evaluations += 2;
    while (b - a > tol && result.evaluations < max_evaluations) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        }
        ++result.evaluations;
    }
    result.argmax = f1 > f2 ? x1 : x2;
    result.value = std::max(f1, f2);
    if (best_f > result.value) { // coarse scan already had the best point
        result.argmax = best_x;
        result.value = best_f;
    }
    result.at_upper_bound = result.argmax >= hi - tol;
    return result;
}

HeuristicResult optimize_level(HeuristicKind kind, const Network& net, const Grouping& grp,
                               std::span<const double> seed, double beta, const CostModel& cost,
                               const TimeGrid& grid, const HeuristicSearch& search, Exec exec) {
    grid.validate();
    if (!(search.u_max > 0.0)) throw std::invalid_argument("heuristic: u_max must be positive");
    if (kind == HeuristicKind::two_stage && grid.steps % 2 != 0)
        throw std::invalid_argument("two-stage control needs an even step count so T/2 is a grid point");

    RewardBreakdown last;
    auto objective = [&](double level) {
        ControlSchedule ctrl = heuristic_schedule(kind, level, grid, grp.group_count());
        Trajectory traj = forward_si(net, grp, ctrl, seed, beta, exec);
        last = reward(traj, ctrl, cost);
        return last.J;
    };

    GoldenResult best =
        golden_section_max(objective, search.u_max, search.tol, search.max_evaluations);
    objective(best.argmax); // refresh `last` for the winning level

    HeuristicResult result;
    result.kind = kind;
    result.level = best.argmax;
    result.J = last.J;
    result.reach = last.reach;
    result.spend = last.spend;
    result.evaluations = best.evaluations;
    result.boundary_warning = best.at_upper_bound;
    if (result.boundary_warning)
        std::cerr << "heuristic: maximizer sits at the search bound u_max = " << search.u_max
                  << "; enlarge u_max\n";
    return result;
}

HeuristicResult evaluate_budget_level(HeuristicKind kind, double level, double ideal_spend,
                                      const Network& net, const Grouping& grp,
                                      std::span<const double> seed, double beta,
                                      const CostModel& cost, const TimeGrid& grid, Exec exec) {
    ControlSchedule ctrl = heuristic_schedule(kind, level, grid, grp.group_count());
    Trajectory traj = forward_si(net, grp, ctrl, seed, beta, exec);
    RewardBreakdown rb = reward(traj, ctrl, cost);
    HeuristicResult result;
    result.kind = kind;
    result.level = level;
    result.J = rb.reach; // budgeted objective is reach alone
    result.reach = rb.reach;
    // spend of the ideal sharp-cutoff schedule; the sampled grid schedule's
    // trapezoid differs by O(dt) for the two-stage shape
    result.spend = ideal_spend;
    result.evaluations = 1;
    return result;
}

} // namespace

HeuristicResult best_static(const Network& net, const Grouping& grp, std::span<const double> seed,
                            double beta, const CostModel& cost, const TimeGrid& grid,
                            const HeuristicSearch& search, Exec exec) {
    return optimize_level(HeuristicKind::static_control, net, grp, seed, beta, cost, grid, search,
                          exec);
}

HeuristicResult best_two_stage(const Network& net, const Grouping& grp,
                               std::span<const double> seed, double beta, const CostModel& cost,
                               const TimeGrid& grid, const HeuristicSearch& search, Exec exec) {
    return optimize_level(HeuristicKind::two_stage, net, grp, seed, beta, cost, grid, search, exec);
}

HeuristicResult static_for_budget(const Network& net, const Grouping& grp,
                                  std::span<const double> seed, double beta, const CostModel& cost,
                                  const TimeGrid& grid, double B, Exec exec) {
    if (!(B >= 0.0)) throw std::invalid_argument("heuristic: budget must be nonnegative");
    const double level = std::sqrt(B / (cost.b * grid.horizon));
    return evaluate_budget_level(HeuristicKind::static_control, level, B, net, grp, seed, beta,
                                 cost, grid, exec);
}

HeuristicResult two_stage_for_budget(const Network& net, const Grouping& grp,
                                     std::span<const double> seed, double beta,
                                     const CostModel& cost, const TimeGrid& grid, double B,
                                     Exec exec) {
    if (!(B >= 0.0)) throw std::invalid_argument("heuristic: budget must be nonnegative");
    if (grid.steps % 2 != 0)
        throw std::invalid_argument("two-stage control needs an even step count so T/2 is a grid point");
    const double level = std::sqrt(2.0 * B / (cost.b * grid.horizon));
    return evaluate_budget_level(HeuristicKind::two_stage, level, B, net, grp, seed, beta, cost,
                                 grid, exec);
}

} // namespace epictrl

#pragma once

#include "epictrl/sweep.hpp"

namespace epictrl {

struct BudgetParams {
    double total = 1.0;     // B
    double mu_low = 1e-2;   // initial bisection bracket
    double mu_high = 10.0;
    double mu_th = 1e-4;    // bracket width tolerance
    double spend_rtol = 1e-3; // |spend - B| / B accepted as matched
    int max_widenings = 60;
    SweepParams sweep;

    void validate() const;
};

struct BudgetSolution {
    ControlSchedule control;
    Trajectory state;
    SolveReport report;     // J = reach - spend; the constrained objective is reach
    double mu_star = 0.0;
    int outer_iterations = 0; // bisection steps, excluding bracket probes
    int widening_steps = 0;
};

/// Total control cost sum_m integral g_m(u_m) dt (composite trapezoid).
double spend_of(const ControlSchedule& ctrl, const CostModel& cost);

/// Fixed-budget problem: bisection on the relaxation multiplier mu, inner
/// sweeps solving the relaxed problem with u_m = g'^-1((1/mu) sum lambda s).
/// Spend is decreasing in mu; the bracket auto-widens (mu_low halves,
/// mu_high doubles) until it straddles B. B = 0 short-circuits to u = 0.
BudgetSolution solve_budget(const Network& net, const Grouping& grp, std::span<const double> seed,
                            double beta, const CostModel& cost, const TimeGrid& grid,
                            const BudgetParams& params, Exec exec = Exec::par);

} // namespace epictrl

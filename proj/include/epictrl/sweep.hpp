#pragma once

#include "epictrl/adjoint.hpp"
#include "epictrl/dynamics.hpp"

namespace epictrl {

struct SweepParams {
    double u_th = 1e-6;            // sup-norm control change accepted as converged
    int max_iterations = 200;      // P
    double damping = 0.5;          // 1.0 reproduces the undamped update
    double stationarity_tol = 1e-3; // max |dH/du| accepted at exit
    double control_sanity_bound = 1e3;

    void validate() const;
};

struct SolveReport {
    double J = 0.0;
    double reach = 0.0;
    double spend = 0.0;
    std::vector<double> per_group_spend;
    int iterations = 0;
    bool converged = false;
    double final_control_delta = 0.0;
    double max_stationarity_residual = 0.0;
    double min_adjoint = 0.0; // most negative costate seen across the sweep
};

struct SweepSolution {
    ControlSchedule control;
    Trajectory state;
    Trajectory adjoint;
    SolveReport report;
};

/// Forward-backward sweep for the fixed-seed problem. Alternates forward
/// state integration, backward adjoint integration, and the maximizing
/// update u_m = g'^-1(sum_{l in N_m} lambda_l s_l), damped by `damping`,
/// until the sup-norm control change drops below u_th or iterations exceed
/// max_iterations (reported via converged, not an exception).
SweepSolution fbs_solve(const Network& net, const Grouping& grp, std::span<const double> seed,
                        double beta, const CostModel& cost, const SweepParams& params,
                        const TimeGrid& grid, Exec exec = Exec::par);

/// Same sweep with the maximizing condition scaled by `weight`:
/// u_m = g'^-1(weight * sum lambda_l s_l). weight = 1 is the plain problem;
/// weight = 1/mu solves the budget-relaxed problem for multiplier mu.
SweepSolution fbs_solve_weighted(const Network& net, const Grouping& grp,
                                 std::span<const double> seed, double beta, const CostModel& cost,
                                 const SweepParams& params, const TimeGrid& grid, double weight,
                                 Exec exec = Exec::par);

} // namespace epictrl

#pragma once

#include "epictrl/sweep.hpp"

namespace epictrl {

/// Per-group seed fractions with the budget constraint
/// sum_m p_m * i0_m = budget and 0 <= i0_m <= 1.
struct SeedVector {
    std::vector<double> i0;
    double budget = 0.0;

    /// Validates the box and budget constraints against `p`.
    static SeedVector checked(std::vector<double> i0, std::span<const double> p, double budget);
};

/// Node j receives i0[group_of(j)].
std::vector<double> expand_seed(const SeedVector& sv, const Grouping& grp);

/// Euclidean projection of `raw` onto {0 <= x <= 1, sum p_m x_m = budget},
/// by bisection on the hyperplane shift with box clipping.
SeedVector project_seed(std::span<const double> raw, std::span<const double> p, double budget);

struct JointOptions {
    int max_outer_iterations = 50; // L
    double fd_step = 1e-3;         // forward-difference step h
    double initial_step = 1.0;
    int max_halvings = 20;
    double j_rel_tol = 1e-6;
};

struct JointSolution {
    SeedVector seeds;
    ControlSchedule control;
    Trajectory state;
    SolveReport report;
    int outer_iterations = 0;
    int evaluations = 0; // inner sweep solves performed
};

/// Projected-gradient ascent on J(i0) from the uniform start i0_m = budget,
/// with forward-difference gradients (M+1 inner solves per iteration) and a
/// backtracking line search. Returns the best iterate seen.
JointSolution joint_optimize(const Network& net, const Grouping& grp, double budget, double beta,
                             const CostModel& cost, const SweepParams& sweep_params,
                             const TimeGrid& grid, const JointOptions& opts = {},
                             Exec exec = Exec::par);

} // namespace epictrl

#pragma once

#include "epictrl/dynamics.hpp"

namespace epictrl {

enum class HeuristicKind { static_control, two_stage };

struct HeuristicResult {
    HeuristicKind kind = HeuristicKind::static_control;
    double level = 0.0; // the constant control value
    double J = 0.0;
    double reach = 0.0;
    double spend = 0.0;
    int evaluations = 0;
    bool boundary_warning = false; // maximizer pinned at u_max
};

struct HeuristicSearch {
    double u_max = 10.0;
    double tol = 1e-5;
    int max_evaluations = 200; // S
};

/// Best constant control, one level shared by all groups, maximizing
/// J = reach - spend by golden-section search over [0, u_max] (after an
/// 8-interval coarse scan to locate the bracket).
HeuristicResult best_static(const Network& net, const Grouping& grp, std::span<const double> seed,
                            double beta, const CostModel& cost, const TimeGrid& grid,
                            const HeuristicSearch& search = {}, Exec exec = Exec::par);

/// Best control that is constant on [0, T/2] and zero afterwards; requires
/// an even number of grid steps so T/2 is a grid point.
HeuristicResult best_two_stage(const Network& net, const Grouping& grp,
                               std::span<const double> seed, double beta, const CostModel& cost,
                               const TimeGrid& grid, const HeuristicSearch& search = {},
                               Exec exec = Exec::par);

/// Budgeted variants: the level follows from spend = B in closed form
/// (sqrt(B/(bT)) static, sqrt(2B/(bT)) two-stage); J is the constrained
/// objective, i.e. reach.
HeuristicResult static_for_budget(const Network& net, const Grouping& grp,
                                  std::span<const double> seed, double beta, const CostModel& cost,
                                  const TimeGrid& grid, double B, Exec exec = Exec::par);
HeuristicResult two_stage_for_budget(const Network& net, const Grouping& grp,
                                     std::span<const double> seed, double beta,
                                     const CostModel& cost, const TimeGrid& grid, double B,
                                     Exec exec = Exec::par);

/// The schedule a heuristic result describes (level on [0,T] or [0,T/2]).
ControlSchedule heuristic_schedule(HeuristicKind kind, double level, TimeGrid grid,
                                   std::int32_t groups);

} // namespace epictrl

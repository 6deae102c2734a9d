#pragma once

#include <span>

#include "epictrl/dynamics.hpp"

namespace epictrl {

/// Integrates the costate equations backward from lambda_j(T) = 1/N using
/// RK4 on the reversed grid; stored states and controls are linearly
/// interpolated at half-steps.
Trajectory backward_adjoint(const Network& net, const Grouping& grp, const ControlSchedule& ctrl,
                            const Trajectory& state, double beta, Exec exec = Exec::par);

/// Pontryagin Hamiltonian at one time slice.
double hamiltonian(std::span<const double> state, std::span<const double> adjoint,
                   std::span<const double> controls, const Network& net, const Grouping& grp,
                   const CostModel& cost, double beta);

/// dH/du_m per grid point: grad(m, k) = -g'_m(u_m(t_k)) + sum_{l in N_m}
/// lambda_l(t_k) s_l(t_k). Zero at a sweep fixed point.
GroupSeries control_gradient(const Trajectory& state, const Trajectory& adjoint,
                             const ControlSchedule& ctrl, const Grouping& grp,
                             const CostModel& cost);

} // namespace epictrl

#include "epictrl/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>
#include <string>

namespace epictrl {

void TimeGrid::validate() const {
    if (!(horizon > 0.0)) throw std::invalid_argument("time grid: horizon must be positive");
    if (steps < 1) throw std::invalid_argument("time grid: need at least one step");
}

double GroupSeries::max_abs_difference(const GroupSeries& a, const GroupSeries& b) {
    if (a.rows_ != b.rows_ || a.values_.size() != b.values_.size())
        throw std::invalid_argument("series shape mismatch");
    double worst = 0.0;
    for (std::size_t i = 0; i < a.values_.size(); ++i)
        worst = std::max(worst, std::abs(a.values_[i] - b.values_[i]));
    return worst;
}

ControlSchedule constant_control(TimeGrid grid, std::int32_t groups, double level) {
    grid.validate();
    return GroupSeries(grid, groups, level);
}

void validate_controls(const ControlSchedule& ctrl) {
    for (double v : ctrl.raw())
        if (!(v >= 0.0) || !std::isfinite(v))
            throw std::invalid_argument("controls must be finite and nonnegative");
}

CostModel CostModel::quadratic(double b, const Grouping& grp) {
    if (!(b > 0.0)) throw std::invalid_argument("cost weight b must be positive");
    CostModel cost;
    cost.b = b;
    cost.p.resize(grp.group_count());
    for (std::int32_t m = 0; m < grp.group_count(); ++m) cost.p[m] = grp.fraction(m);
    return cost;
}

namespace {

/// d i / dt for one node: beta * s_j * (A i)_j + u_node_j * s_j.
inline double si_rhs_row(const Network& net, const double* state, const double* u_node,
                         double beta, std::int32_t j) {
    double acc = 0.0;
    for (std::int32_t k : net.neighbors(j)) acc += state[k];
    const double s = 1.0 - state[j];
    return beta * s * acc + u_node[j] * s;
}

struct Rk4Buffers {
    std::vector<double> stage, k1, k2, k3, k4;
    explicit Rk4Buffers(std::int32_t n) : stage(n), k1(n), k2(n), k3(n), k4(n) {}
};

/// One RK4 step of the SI system; updates x in place and returns the largest
/// clip applied to keep states inside [0,1]. Serial reference version.
double si_step_serial(const Network& net, std::vector<double>& x, const double* u_lo,
                      const double* u_mid, const double* u_hi, double beta, double dt,
                      Rk4Buffers& b) {
    const std::int32_t n = net.node_count();
    for (std::int32_t j = 0; j < n; ++j) b.k1[j] = si_rhs_row(net, x.data(), u_lo, beta, j);
    for (std::int32_t j = 0; j < n; ++j) b.stage[j] = x[j] + 0.5 * dt * b.k1[j];
    for (std::int32_t j = 0; j < n; ++j) b.k2[j] = si_rhs_row(net, b.stage.data(), u_mid, beta, j);
    for (std::int32_t j = 0; j < n; ++j) b.stage[j] = x[j] + 0.5 * dt * b.k2[j];
    for (std::int32_t j = 0; j < n; ++j) b.k3[j] = si_rhs_row(net, b.stage.data(), u_mid, beta, j);
    for (std::int32_t j = 0; j < n; ++j) b.stage[j] = x[j] + dt * b.k3[j];
    for (std::int32_t j = 0; j < n; ++j) b.k4[j] = si_rhs_row(net, b.stage.data(), u_hi, beta, j);
    double clamp = 0.0;
    for (std::int32_t j = 0; j < n; ++j) {
        double v = x[j] + dt / 6.0 * (b.k1[j] + 2.0 * b.k2[j] + 2.0 * b.k3[j] + b.k4[j]);
        if (!std::isfinite(v)) clamp = std::numeric_limits<double>::infinity();
        if (v < 0.0) {
            clamp = std::max(clamp, -v);
            v = 0.0;
        } else if (v > 1.0) {
            clamp = std::max(clamp, v - 1.0);
            v = 1.0;
        }
        x[j] = v;
    }
    return clamp;
}

/// OpenMP time loop: one persistent parallel region for the whole
/// integration, worksharing every stage; the dynamics are memory-bound, so
/// keeping the team alive beats per-step regions. Returns the largest clip
/// (infinity marks a non-finite state) and the offending step via bad_step.
double si_loop_parallel(const Network& net, const Grouping& grp, const ControlSchedule& ctrl,
                        std::vector<double>& x, double beta, Trajectory& traj,
                        std::int32_t& bad_step, Rk4Buffers& b) {
    const std::int32_t n = net.node_count();
    const std::int32_t K = ctrl.grid().steps;
    const double dt = ctrl.grid().dt();
    const std::int32_t M = ctrl.rows();
    std::vector<double> u_lo(n), u_mid(n), u_hi(n);
    double clamp = 0.0;
    bad_step = -1;

#pragma omp parallel
    {
        std::vector<double> mid(M);
        double local_clamp = 0.0;
        for (std::int32_t k = 0; k < K && bad_step < 0; ++k) {
            auto lo = ctrl.slice(k);
            auto hi = ctrl.slice(k + 1);
            for (std::int32_t m = 0; m < M; ++m) mid[m] = 0.5 * (lo[m] + hi[m]);
#pragma omp for schedule(static)
            for (std::int32_t j = 0; j < n; ++j) {
                const std::int32_t g = grp.group_of(j);
                u_lo[j] = lo[g];
                u_mid[j] = mid[g];
                u_hi[j] = hi[g];
            }
#pragma omp for schedule(static, 64)
            for (std::int32_t j = 0; j < n; ++j)
                b.k1[j] = si_rhs_row(net, x.data(), u_lo.data(), beta, j);
#pragma omp for schedule(static)
            for (std::int32_t j = 0; j < n; ++j) b.stage[j] = x[j] + 0.5 * dt * b.k1[j];
#pragma omp for schedule(static, 64)
            for (std::int32_t j = 0; j < n; ++j)
                b.k2[j] = si_rhs_row(net, b.stage.data(), u_mid.data(), beta, j);
#pragma omp for schedule(static)
            for (std::int32_t j = 0; j < n; ++j) b.stage[j] = x[j] + 0.5 * dt * b.k2[j];
#pragma omp for schedule(static, 64)
            for (std::int32_t j = 0; j < n; ++j)
                b.k3[j] = si_rhs_row(net, b.stage.data(), u_mid.data(), beta, j);
#pragma omp for schedule(static)
            for (std::int32_t j = 0; j < n; ++j) b.stage[j] = x[j] + dt * b.k3[j];
#pragma omp for schedule(static, 64)
            for (std::int32_t j = 0; j < n; ++j)
                b.k4[j] = si_rhs_row(net, b.stage.data(), u_hi.data(), beta, j);
            auto out = traj.series.slice(k + 1);
            bool local_bad = false;
#pragma omp for schedule(static)
            for (std::int32_t j = 0; j < n; ++j) {
                double v = x[j] + dt / 6.0 * (b.k1[j] + 2.0 * b.k2[j] + 2.0 * b.k3[j] + b.k4[j]);
                if (!std::isfinite(v)) local_bad = true;
                if (v < 0.0) {
                    local_clamp = std::max(local_clamp, -v);
                    v = 0.0;
                } else if (v > 1.0) {
                    local_clamp = std::max(local_clamp, v - 1.0);
                    v = 1.0;
                }
                x[j] = v;
                out[j] = v;
            }
            if (local_bad) {
#pragma omp atomic write
                bad_step = k + 1;
            }
#pragma omp barrier
        }
#pragma omp critical(si_loop_clamp)
        clamp = std::max(clamp, local_clamp);
    }
    return bad_step >= 0 ? std::numeric_limits<double>::infinity() : clamp;
}

} // namespace

void expand_to_nodes(const Grouping& grp, std::span<const double> group_values,
                     std::span<double> node_values) {
    for (std::int32_t j = 0; j < grp.node_count(); ++j)
        node_values[j] = group_values[grp.group_of(j)];
}

Trajectory forward_si(const Network& net, const Grouping& grp, const ControlSchedule& ctrl,
                      std::span<const double> seed, double beta, Exec exec) {
    const std::int32_t n = net.node_count();
    ctrl.grid().validate();
    validate_controls(ctrl);
    if (!(beta >= 0.0)) throw std::invalid_argument("forward_si: beta must be nonnegative");
    if (grp.node_count() != n) throw std::invalid_argument("forward_si: grouping/network mismatch");
    if (ctrl.rows() != grp.group_count())
        throw std::invalid_argument("forward_si: control rows != group count");
    if (static_cast<std::int32_t>(seed.size()) != n)
        throw std::invalid_argument("forward_si: seed length != node count");
    for (double v : seed)
        if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("forward_si: seed outside [0,1]");

    const TimeGrid grid = ctrl.grid();
    const std::int32_t K = grid.steps;
    const double dt = grid.dt();
    const std::int32_t M = grp.group_count();

    Trajectory traj;
    traj.kind = TrajectoryKind::state;
    traj.series = GroupSeries(grid, n);
    std::copy(seed.begin(), seed.end(), traj.series.slice(0).begin());

    std::vector<double> x(seed.begin(), seed.end());
    Rk4Buffers buffers(n);

    if (exec == Exec::par && n > kParallelNodeThreshold) {
        std::int32_t bad_step = -1;
        const double clamp = si_loop_parallel(net, grp, ctrl, x, beta, traj, bad_step, buffers);
        if (bad_step >= 0)
            throw std::runtime_error("forward_si: non-finite state at step " +
                                     std::to_string(bad_step));
        traj.max_clamp_excess = clamp;
    } else {
        std::vector<double> u_lo(n), u_mid(n), u_hi(n), u_group_mid(M);
        for (std::int32_t k = 0; k < K; ++k) {
            auto lo = ctrl.slice(k);
            auto hi = ctrl.slice(k + 1);
            for (std::int32_t m = 0; m < M; ++m) u_group_mid[m] = 0.5 * (lo[m] + hi[m]);
            expand_to_nodes(grp, lo, u_lo);
            expand_to_nodes(grp, u_group_mid, u_mid);
            expand_to_nodes(grp, hi, u_hi);

            const double clamp = si_step_serial(net, x, u_lo.data(), u_mid.data(), u_hi.data(),
                                                beta, dt, buffers);
            if (std::isinf(clamp))
                throw std::runtime_error("forward_si: non-finite state at step " +
                                         std::to_string(k + 1));
            traj.max_clamp_excess = std::max(traj.max_clamp_excess, clamp);
            std::copy(x.begin(), x.end(), traj.series.slice(k + 1).begin());
        }
    }
    if (traj.max_clamp_excess > 1e-9)
        std::cerr << "forward_si: state clipped to [0,1] by " << traj.max_clamp_excess
                  << "; step size may be too coarse\n";
    return traj;
}

namespace {

/// Composite trapezoid weight for grid point k.
double trapezoid_weight(const TimeGrid& grid, std::int32_t k) {
    return (k == 0 || k == grid.steps) ? 0.5 * grid.dt() : grid.dt();
}

} // namespace

RewardBreakdown reward(const Trajectory& state, const ControlSchedule& ctrl,
                       const CostModel& cost) {
    if (!(state.grid() == ctrl.grid())) throw std::invalid_argument("reward: grid mismatch");
    const std::int32_t n = state.nodes();
    const std::int32_t M = ctrl.rows();

    RewardBreakdown out;
    auto final_slice = state.slice(state.grid().steps);
    double sum = 0.0;
    for (double v : final_slice) sum += v;
    out.reach = sum / n;

    out.per_group_spend.assign(M, 0.0);
    for (std::int32_t k = 0; k <= ctrl.grid().steps; ++k) {
        const double w = trapezoid_weight(ctrl.grid(), k);
        auto u = ctrl.slice(k);
        for (std::int32_t m = 0; m < M; ++m) out.per_group_spend[m] += w * cost.g(m, u[m]);
    }
    for (double s : out.per_group_spend) out.spend += s;
    out.J = out.reach - out.spend;
    return out;
}

double per_capita_resource(const ControlSchedule& ctrl, const CostModel& cost, std::int32_t m) {
    if (m < 0 || m >= ctrl.rows()) throw std::invalid_argument("per_capita_resource: bad group");
    double acc = 0.0;
    for (std::int32_t k = 0; k <= ctrl.grid().steps; ++k) {
        const double u = ctrl.at(m, k);
        acc += trapezoid_weight(ctrl.grid(), k) * u * u;
    }
    return cost.b * acc;
}

} // namespace epictrl

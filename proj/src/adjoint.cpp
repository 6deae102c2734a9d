#include "epictrl/adjoint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace epictrl {

namespace {

/// lambda'_j = -beta * sum_{l ~ j} lambda_l s_l + beta * lambda_j * (A i)_j
///           + lambda_j * u_{g(j)}; the lambda_l s_l product is recomputed
/// per edge, which costs a few multiplies but keeps the stage a single pass.
inline double adjoint_rhs_row(const Network& net, const double* lambda, const double* state,
                              const double* u_node, double beta, std::int32_t j) {
    double incoming = 0.0; // sum of lambda_l s_l over neighbors (A symmetric)
    double infected = 0.0; // (A i)_j
    for (std::int32_t l : net.neighbors(j)) {
        incoming += lambda[l] * (1.0 - state[l]);
        infected += state[l];
    }
    return -beta * incoming + lambda[j] * (beta * infected + u_node[j]);
}

struct AdjointBuffers {
    std::vector<double> stage, k1, k2, k3, k4;
    explicit AdjointBuffers(std::int32_t n) : stage(n), k1(n), k2(n), k3(n), k4(n) {}
};

/// Serial reference step from t_k to t_{k-1}; returns false on overflow.
bool adjoint_step_serial(const Network& net, std::vector<double>& lambda, const double* x_hi,
                         const double* x_mid, const double* x_lo, const double* u_hi,
                         const double* u_mid, const double* u_lo, double beta, double h,
                         AdjointBuffers& b) {
    const std::int32_t n = net.node_count();
    for (std::int32_t j = 0; j < n; ++j)
        b.k1[j] = adjoint_rhs_row(net, lambda.data(), x_hi, u_hi, beta, j);
    for (std::int32_t j = 0; j < n; ++j) b.stage[j] = lambda[j] + 0.5 * h * b.k1[j];
    for (std::int32_t j = 0; j < n; ++j)
        b.k2[j] = adjoint_rhs_row(net, b.stage.data(), x_mid, u_mid, beta, j);
    for (std::int32_t j = 0; j < n; ++j) b.stage[j] = lambda[j] + 0.5 * h * b.k2[j];
    for (std::int32_t j = 0; j < n; ++j)
        b.k3[j] = adjoint_rhs_row(net, b.stage.data(), x_mid, u_mid, beta, j);
    for (std::int32_t j = 0; j < n; ++j) b.stage[j] = lambda[j] + h * b.k3[j];
    for (std::int32_t j = 0; j < n; ++j)
        b.k4[j] = adjoint_rhs_row(net, b.stage.data(), x_lo, u_lo, beta, j);
    bool finite = true;
    for (std::int32_t j = 0; j < n; ++j) {
        lambda[j] += h / 6.0 * (b.k1[j] + 2.0 * b.k2[j] + 2.0 * b.k3[j] + b.k4[j]);
        finite = finite && std::isfinite(lambda[j]);
    }
    return finite;
}

/// OpenMP backward loop mirroring si_loop_parallel: one persistent region,
/// worksharing every stage loop, uniform early exit on overflow.
void adjoint_loop_parallel(const Network& net, const Grouping& grp, const ControlSchedule& ctrl,
                           const Trajectory& state, std::vector<double>& lambda, double beta,
                           Trajectory& traj, std::int32_t& bad_step, AdjointBuffers& b) {
    const std::int32_t n = net.node_count();
    const std::int32_t K = ctrl.grid().steps;
    const double h = -ctrl.grid().dt();
    const std::int32_t M = ctrl.rows();
    std::vector<double> x_mid(n), u_lo(n), u_mid(n), u_hi(n);
    bad_step = -1;

#pragma omp parallel
    {
        std::vector<double> mid(M);
        for (std::int32_t k = K; k > 0 && bad_step < 0; --k) {
            auto x_hi = state.slice(k);
            auto x_lo = state.slice(k - 1);
            auto c_hi = ctrl.slice(k);
            auto c_lo = ctrl.slice(k - 1);
            for (std::int32_t m = 0; m < M; ++m) mid[m] = 0.5 * (c_lo[m] + c_hi[m]);
#pragma omp for schedule(static)
            for (std::int32_t j = 0; j < n; ++j) {
                x_mid[j] = 0.5 * (x_lo[j] + x_hi[j]);
                const std::int32_t g = grp.group_of(j);
                u_lo[j] = c_lo[g];
                u_mid[j] = mid[g];
                u_hi[j] = c_hi[g];
            }
#pragma omp for schedule(static, 64)
            for (std::int32_t j = 0; j < n; ++j)
                b.k1[j] = adjoint_rhs_row(net, lambda.data(), x_hi.data(), u_hi.data(), beta, j);
#pragma omp for schedule(static)
            for (std::int32_t j = 0; j < n; ++j) b.stage[j] = lambda[j] + 0.5 * h * b.k1[j];
#pragma omp for schedule(static, 64)
            for (std::int32_t j = 0; j < n; ++j)
                b.k2[j] = adjoint_rhs_row(net, b.stage.data(), x_mid.data(), u_mid.data(), beta, j);
#pragma omp for schedule(static)
            for (std::int32_t j = 0; j < n; ++j) b.stage[j] = lambda[j] + 0.5 * h * b.k2[j];
#pragma omp for schedule(static, 64)
            for (std::int32_t j = 0; j < n; ++j)
                b.k3[j] = adjoint_rhs_row(net, b.stage.data(), x_mid.data(), u_mid.data(), beta, j);
#pragma omp for schedule(static)
            for (std::int32_t j = 0; j < n; ++j) b.stage[j] = lambda[j] + h * b.k3[j];
#pragma omp for schedule(static, 64)
            for (std::int32_t j = 0; j < n; ++j)
                b.k4[j] = adjoint_rhs_row(net, b.stage.data(), x_lo.data(), u_lo.data(), beta, j);
            auto out = traj.series.slice(k - 1);
            bool local_bad = false;
#pragma omp for schedule(static)
            for (std::int32_t j = 0; j < n; ++j) {
                lambda[j] += h / 6.0 * (b.k1[j] + 2.0 * b.k2[j] + 2.0 * b.k3[j] + b.k4[j]);
                if (!std::isfinite(lambda[j])) local_bad = true;
                out[j] = lambda[j];
            }
            if (local_bad) {
#pragma omp atomic write
                bad_step = k - 1;
            }
#pragma omp barrier
        }
    }
}

} // namespace

Trajectory backward_adjoint(const Network& net, const Grouping& grp, const ControlSchedule& ctrl,
                            const Trajectory& state, double beta, Exec exec) {
    const std::int32_t n = net.node_count();
    if (state.nodes() != n || grp.node_count() != n)
        throw std::invalid_argument("backward_adjoint: dimension mismatch");
    if (!(state.grid() == ctrl.grid()))
        throw std::invalid_argument("backward_adjoint: grid mismatch");
    if (ctrl.rows() != grp.group_count())
        throw std::invalid_argument("backward_adjoint: control rows != group count");

    const TimeGrid grid = ctrl.grid();
    const std::int32_t K = grid.steps;
    const std::int32_t M = grp.group_count();

    Trajectory traj;
    traj.kind = TrajectoryKind::adjoint;
    traj.series = GroupSeries(grid, n);

    std::vector<double> lambda(n, 1.0 / n); // transversality value
    std::copy(lambda.begin(), lambda.end(), traj.series.slice(K).begin());

    AdjointBuffers buffers(n);

    if (exec == Exec::par && n > kParallelNodeThreshold) {
        std::int32_t bad_step = -1;
        adjoint_loop_parallel(net, grp, ctrl, state, lambda, beta, traj, bad_step, buffers);
        if (bad_step >= 0)
            throw std::runtime_error("backward_adjoint: non-finite costate at step " +
                                     std::to_string(bad_step));
        return traj;
    }

    // integrate from t_k down to t_{k-1}, interpolating stored states and
    // controls at the half-step
    std::vector<double> x_mid(n), u_lo(n), u_mid(n), u_hi(n), u_group_mid(M);
    for (std::int32_t k = K; k > 0; --k) {
        auto x_hi = state.slice(k);
        auto x_lo = state.slice(k - 1);
        for (std::int32_t j = 0; j < n; ++j) x_mid[j] = 0.5 * (x_lo[j] + x_hi[j]);

        auto c_hi = ctrl.slice(k);
        auto c_lo = ctrl.slice(k - 1);
        for (std::int32_t m = 0; m < M; ++m) u_group_mid[m] = 0.5 * (c_lo[m] + c_hi[m]);
        expand_to_nodes(grp, c_hi, u_hi);
        expand_to_nodes(grp, u_group_mid, u_mid);
        expand_to_nodes(grp, c_lo, u_lo);

        const bool finite =
            adjoint_step_serial(net, lambda, x_hi.data(), x_mid.data(), x_lo.data(), u_hi.data(),
                                u_mid.data(), u_lo.data(), beta, -grid.dt(), buffers);
        if (!finite)
            throw std::runtime_error("backward_adjoint: non-finite costate at step " +
                                     std::to_string(k - 1));
        std::copy(lambda.begin(), lambda.end(), traj.series.slice(k - 1).begin());
    }
    return traj;
}

double hamiltonian(std::span<const double> state, std::span<const double> adjoint,
                   std::span<const double> controls, const Network& net, const Grouping& grp,
                   const CostModel& cost, double beta) {
    const std::int32_t n = net.node_count();
    double value = 0.0;
    for (std::int32_t m = 0; m < grp.group_count(); ++m) value -= cost.g(m, controls[m]);
    for (std::int32_t l = 0; l < n; ++l) {
        double infected = 0.0;
        for (std::int32_t k : net.neighbors(l)) infected += state[k];
        const double s = 1.0 - state[l];
        value += adjoint[l] * (beta * s * infected + controls[grp.group_of(l)] * s);
    }
    return value;
}

GroupSeries control_gradient(const Trajectory& state, const Trajectory& adjoint,
                             const ControlSchedule& ctrl, const Grouping& grp,
                             const CostModel& cost) {
    if (!(state.grid() == ctrl.grid()) || !(adjoint.grid() == ctrl.grid()))
        throw std::invalid_argument("control_gradient: grid mismatch");
    const std::int32_t M = grp.group_count();
    const std::int32_t n = grp.node_count();

    GroupSeries grad(ctrl.grid(), M);
    for (std::int32_t k = 0; k <= ctrl.grid().steps; ++k) {
        auto x = state.slice(k);
        auto lam = adjoint.slice(k);
        auto u = ctrl.slice(k);
        auto g = grad.slice(k);
        for (std::int32_t j = 0; j < n; ++j)
            g[grp.group_of(j)] += lam[j] * (1.0 - x[j]);
        for (std::int32_t m = 0; m < M; ++m) g[m] -= cost.g_prime(m, u[m]);
    }
    return grad;
}

} // namespace epictrl

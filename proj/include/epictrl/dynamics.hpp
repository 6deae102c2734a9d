#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "epictrl/centrality.hpp"
#include "epictrl/exec.hpp"
#include "epictrl/network.hpp"

namespace epictrl {

/// Uniform grid t_k = k * horizon / steps, k = 0..steps.
struct TimeGrid {
    double horizon = 1.0;
    std::int32_t steps = 100;

    double dt() const { return horizon / steps; }
    std::int32_t points() const { return steps + 1; }
    double time_at(std::int32_t k) const { return k * horizon / steps; }

    void validate() const;
    bool operator==(const TimeGrid&) const = default;
};

/// Per-group time series sampled on a grid; values between grid points are
/// linearly interpolated. Layout is slice-major: index k*rows + m.
class GroupSeries {
public:
    GroupSeries() = default;
    GroupSeries(TimeGrid grid, std::int32_t rows, double fill = 0.0)
        : grid_(grid), rows_(rows),
          values_(static_cast<std::size_t>(grid.points()) * rows, fill) {}

    const TimeGrid& grid() const { return grid_; }
    std::int32_t rows() const { return rows_; }

    double at(std::int32_t row, std::int32_t k) const {
        return values_[static_cast<std::size_t>(k) * rows_ + row];
    }
    double& at(std::int32_t row, std::int32_t k) {
        return values_[static_cast<std::size_t>(k) * rows_ + row];
    }
    std::span<const double> slice(std::int32_t k) const {
        return {values_.data() + static_cast<std::size_t>(k) * rows_,
                static_cast<std::size_t>(rows_)};
    }
    std::span<double> slice(std::int32_t k) {
        return {values_.data() + static_cast<std::size_t>(k) * rows_,
                static_cast<std::size_t>(rows_)};
    }
    const std::vector<double>& raw() const { return values_; }

    /// Max over rows and grid points of |a - b|.
    static double max_abs_difference(const GroupSeries& a, const GroupSeries& b);

private:
    TimeGrid grid_;
    std::int32_t rows_ = 0;
    std::vector<double> values_;
};

/// Control schedule u_m(t_k), one row per group; entries must be finite and
/// nonnegative (validate_controls enforces this at module boundaries).
using ControlSchedule = GroupSeries;

ControlSchedule constant_control(TimeGrid grid, std::int32_t groups, double level);
void validate_controls(const ControlSchedule& ctrl);

enum class TrajectoryKind { state, adjoint };

/// Per-node trajectory on a grid, one row per node; slice-major like
/// GroupSeries. State trajectories hold infection probabilities i_j(t_k),
/// adjoint trajectories hold costate values.
struct Trajectory {
    GroupSeries series;
    TrajectoryKind kind = TrajectoryKind::state;
    double max_clamp_excess = 0.0; // largest out-of-[0,1] overshoot clipped

    double at(std::int32_t node, std::int32_t k) const { return series.at(node, k); }
    std::span<const double> slice(std::int32_t k) const { return series.slice(k); }
    const TimeGrid& grid() const { return series.grid(); }
    std::int32_t nodes() const { return series.rows(); }
};

/// Group cost g_m(u) = b * p_m * u^2, expressed through (g, g', g'^-1) so
/// other strictly convex even costs can replace it.
struct CostModel {
    double b = 25.0;
    std::vector<double> p; // group fractions, sum to 1

    static CostModel quadratic(double b, const Grouping& grp);

    double g(std::int32_t m, double u) const { return b * p[m] * u * u; }
    double g_prime(std::int32_t m, double u) const { return 2.0 * b * p[m] * u; }
    double g_prime_inverse(std::int32_t m, double y) const { return y / (2.0 * b * p[m]); }
};

/// node_values[j] = group_values[group_of(j)].
void expand_to_nodes(const Grouping& grp, std::span<const double> group_values,
                     std::span<double> node_values);

/// Integrates di_j/dt = beta * s_j * sum_k A_jk i_k + u_{g(j)}(t) * s_j from
/// i(0) = seed with classic RK4; controls linearly interpolated at
/// half-steps; states clipped to [0,1] after each step.
Trajectory forward_si(const Network& net, const Grouping& grp, const ControlSchedule& ctrl,
                      std::span<const double> seed, double beta, Exec exec = Exec::par);

struct RewardBreakdown {
    double J = 0.0;
    double reach = 0.0; // mean final infection probability
    double spend = 0.0; // total control cost
    std::vector<double> per_group_spend;
};

/// J = reach - spend with spend integrated by composite trapezoid.
RewardBreakdown reward(const Trajectory& state, const ControlSchedule& ctrl,
                       const CostModel& cost);

/// b * integral of u_m^2 over the horizon (group spend / p_m).
double per_capita_resource(const ControlSchedule& ctrl, const CostModel& cost, std::int32_t m);

} // namespace epictrl

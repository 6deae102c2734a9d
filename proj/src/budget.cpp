#include "epictrl/budget.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace epictrl {

void BudgetParams::validate() const {
    if (!(total >= 0.0)) throw std::invalid_argument("budget: B must be nonnegative");
    if (!(mu_low > 0.0 && mu_low < mu_high))
        throw std::invalid_argument("budget: need 0 < mu_low < mu_high");
    if (!(mu_th > 0.0)) throw std::invalid_argument("budget: mu_th must be positive");
    if (!(spend_rtol > 0.0)) throw std::invalid_argument("budget: spend_rtol must be positive");
    sweep.validate();
}

double spend_of(const ControlSchedule& ctrl, const CostModel& cost) {
    if (ctrl.rows() != static_cast<std::int32_t>(cost.p.size()))
        throw std::invalid_argument("spend_of: group count mismatch");
    const double dt = ctrl.grid().dt();
    double total = 0.0;
    for (std::int32_t k = 0; k <= ctrl.grid().steps; ++k) {
        const double w = (k == 0 || k == ctrl.grid().steps) ? 0.5 * dt : dt;
        auto u = ctrl.slice(k);
        for (std::int32_t m = 0; m < ctrl.rows(); ++m) total += w * cost.g(m, u[m]);
    }
    return total;
}

BudgetSolution solve_budget(const Network& net, const Grouping& grp, std::span<const double> seed,
                            double beta, const CostModel& cost, const TimeGrid& grid,
                            const BudgetParams& params, Exec exec) {
    params.validate();
    grid.validate();
    const double B = params.total;

    BudgetSolution out;
    if (B == 0.0) {
        ControlSchedule zero = constant_control(grid, grp.group_count(), 0.0);
        Trajectory state = forward_si(net, grp, zero, seed, beta, exec);
        RewardBreakdown rb = reward(state, zero, cost);
        out.control = std::move(zero);
        out.state = std::move(state);
        out.report.J = rb.J;
        out.report.reach = rb.reach;
        out.report.spend = rb.spend;
        out.report.per_group_spend = std::move(rb.per_group_spend);
        out.report.converged = true;
        return out;
    }

    auto solve_at = [&](double mu) {
        return fbs_solve_weighted(net, grp, seed, beta, cost, params.sweep, grid, 1.0 / mu, exec);
    };

    // establish spend(mu_low) >= B >= spend(mu_high); spend decreases in mu
    double mu_low = params.mu_low;
    double mu_high = params.mu_high;
    int widenings = 0;
    SweepSolution at_low = solve_at(mu_low);
    while (at_low.report.spend < B) {
        if (++widenings > params.max_widenings)
            throw std::runtime_error("solve_budget: cannot bracket the multiplier from below; "
                                     "budget may be unattainable");
        mu_low *= 0.5;
        at_low = solve_at(mu_low);
    }
    SweepSolution at_high = solve_at(mu_high);
    while (at_high.report.spend > B) {
        if (++widenings > params.max_widenings)
            throw std::runtime_error("solve_budget: cannot bracket the multiplier from above");
        mu_high *= 2.0;
        at_high = solve_at(mu_high);
    }

    auto finish = [&](SweepSolution&& sol, double mu, int iterations) {
        out.control = std::move(sol.control);
        out.state = std::move(sol.state);
        out.report = std::move(sol.report);
        out.mu_star = mu;
        out.outer_iterations = iterations;
        out.widening_steps = widenings;
        return std::move(out);
    };

    // one of the probes may already satisfy the budget
    if (std::abs(at_low.report.spend - B) <= params.spend_rtol * B)
        return finish(std::move(at_low), mu_low, 0);
    if (std::abs(at_high.report.spend - B) <= params.spend_rtol * B)
        return finish(std::move(at_high), mu_high, 0);

    int iterations = 0;
    SweepSolution current;
    double mu = mu_low;
    while (mu_high - mu_low >= params.mu_th) {
        ++iterations;
        mu = 0.5 * (mu_low + mu_high);
        current = solve_at(mu);
        if (std::abs(current.report.spend - B) <= params.spend_rtol * B)
            return finish(std::move(current), mu, iterations);
        if (current.report.spend > B)
            mu_low = mu;
        else
            mu_high = mu;
    }
    if (iterations == 0) { // bracket narrower than mu_th from the start
        ++iterations;
        mu = 0.5 * (mu_low + mu_high);
        current = solve_at(mu);
    }
    return finish(std::move(current), mu, iterations);
}

} // namespace epictrl

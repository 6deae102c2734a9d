#include <doctest.h>

#include <cmath>

#include "epictrl/heuristics.hpp"
#include "epictrl/rng.hpp"
#include "epictrl/sweep.hpp"
#include "oracles.hpp"

using namespace epictrl;

namespace {

constexpr double kOmega = 0.5671432904097838; // root of exp(-x) = x

Network single_node() { return Network::from_edges(1, {}); }

} // namespace

TEST_CASE("best static control on a single node") {
    Network net = single_node();
    Grouping grp = Grouping::single_group(1);
    CostModel cost = CostModel::quadratic(0.5, grp);
    TimeGrid grid{1.0, 400};
    std::vector<double> seed{0.0};

    // stationarity of J(c) = (1 - e^-c) - 0.5 c^2: e^-c = c, the omega constant
    const double c_star = oracles::bisect_root(
        [](double c) { return std::exp(-c) - c; }, 0.1, 1.0);
    CHECK(c_star == doctest::Approx(kOmega).epsilon(1e-12));
    const double J_star = (1.0 - c_star) - 0.5 * c_star * c_star;
    CHECK(J_star == doctest::Approx(0.27203095366179797).epsilon(1e-12));

    HeuristicResult res = best_static(net, grp, seed, 0.0, cost, grid);
    CHECK(res.kind == HeuristicKind::static_control);
    CHECK(std::abs(res.level - c_star) < 1e-4);
    CHECK(std::abs(res.J - J_star) < 1e-7);
    CHECK_FALSE(res.boundary_warning);
    CHECK(res.evaluations <= 200);
}

TEST_CASE("best two-stage control on a single node") {
    Network net = single_node();
    Grouping grp = Grouping::single_group(1);
    CostModel cost = CostModel::quadratic(0.25, grp);
    TimeGrid grid{1.0, 400};
    std::vector<double> seed{0.0};

    // With the grid-sampled cutoff the effective half-horizon is
    // tau = (T + dt) / 2: J(c) = (1 - e^{-c tau}) - b c^2 tau, so the
    // stationary point solves e^{-c tau} = 2 b c.
    const double tau = 0.5 * (grid.horizon + grid.dt());
    const double c_star = oracles::bisect_root(
        [&](double c) { return std::exp(-c * tau) - 0.5 * c; }, 0.5, 2.0);
    CHECK(c_star == doctest::Approx(2.0 * kOmega).epsilon(2e-3)); // sharp-cutoff limit
    const double J_star = (1.0 - std::exp(-c_star * tau)) - 0.25 * c_star * c_star * tau;

    HeuristicResult res = best_two_stage(net, grp, seed, 0.0, cost, grid);
    CHECK(std::abs(res.level - c_star) < 1e-3);
    CHECK(std::abs(res.J - J_star) < 1e-7);

    SUBCASE("odd step counts are rejected") {
        TimeGrid odd{1.0, 55};
        CHECK_THROWS(best_two_stage(net, grp, seed, 0.0, cost, odd));
    }
}

TEST_CASE("static dominates two-stage at beta = 0") {
    SplitMix64 rng(83);
    for (int trial = 0; trial < 3; ++trial) {
        Network net = generate_gnp(12, 0.3, rng.next());
        Grouping grp = Grouping::single_group(12);
        CostModel cost = CostModel::quadratic(1.0 + 3.0 * trial, grp);
        TimeGrid grid{1.0, 100};
        std::vector<double> seed(12, 0.05);
        HeuristicResult st = best_static(net, grp, seed, 0.0, cost, grid);
        HeuristicResult ts = best_two_stage(net, grp, seed, 0.0, cost, grid);
        CHECK(st.J >= ts.J - 1e-9);
    }
}

TEST_CASE("heuristic baselines never beat doing nothing by less than zero") {
    Network net = generate_gnp(15, 0.25, 89);
    Grouping grp = Grouping::single_group(15);
    CostModel cost = CostModel::quadratic(50.0, grp);
    TimeGrid grid{1.0, 60};
    std::vector<double> seed(15, 0.1);
    ControlSchedule zero = constant_control(grid, 1, 0.0);
    const double J_zero = reward(forward_si(net, grp, zero, seed, 0.3), zero, cost).J;
    HeuristicResult st = best_static(net, grp, seed, 0.3, cost, grid);
    CHECK(st.J >= J_zero - 1e-12);
}

TEST_CASE("sweep solution dominates both heuristics") {
    SplitMix64 rng(97);
    for (int trial = 0; trial < 3; ++trial) {
        Network net = generate_gnp(16, 0.2, rng.next());
        Grouping grp = group_by_centrality(degree_centrality(net), 2, 1);
        CostModel cost = CostModel::quadratic(trial == 0 ? 5.0 : 25.0, grp);
        TimeGrid grid{1.0, 80};
        std::vector<double> seed(16, 0.05);
        SweepParams sp;
        sp.u_th = 1e-8;
        sp.max_iterations = 1000;
        SweepSolution opt = fbs_solve(net, grp, seed, 0.25, cost, sp, grid);
        REQUIRE(opt.report.converged);
        HeuristicResult st = best_static(net, grp, seed, 0.25, cost, grid);
        HeuristicResult ts = best_two_stage(net, grp, seed, 0.25, cost, grid);
        CHECK(opt.report.J >= st.J - 1e-6);
        CHECK(opt.report.J >= ts.J - 1e-6);
    }
}

TEST_CASE("prohibitive cost pushes the static level to zero") {
    Network net = generate_gnp(10, 0.3, 101);
    Grouping grp = Grouping::single_group(10);
    CostModel cost = CostModel::quadratic(1e6, grp);
    TimeGrid grid{1.0, 50};
    std::vector<double> seed(10, 0.1);
    HeuristicResult res = best_static(net, grp, seed, 0.4, cost, grid);
    CHECK(res.level < 1e-3);
    ControlSchedule zero = constant_control(grid, 1, 0.0);
    const double J_zero = reward(forward_si(net, grp, zero, seed, 0.4), zero, cost).J;
    CHECK(res.J == doctest::Approx(J_zero).epsilon(1e-6));
}

TEST_CASE("budgeted heuristic levels follow the closed forms") {
    Network net = single_node();
    Grouping grp = Grouping::single_group(1);
    CostModel cost = CostModel::quadratic(25.0, grp);
    TimeGrid grid{1.0, 100};
    std::vector<double> seed{0.0};

    SUBCASE("static: level = sqrt(B / (b T)) and spend = B exactly") {
        HeuristicResult res = static_for_budget(net, grp, seed, 0.0, cost, grid, 6.25);
        CHECK(res.level == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(res.spend == 6.25);
        CHECK(res.J == res.reach);
    }
    SUBCASE("two-stage: level = sqrt(2B / (b T))") {
        HeuristicResult res = two_stage_for_budget(net, grp, seed, 0.0, cost, grid, 6.25);
        CHECK(res.level == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
        CHECK(res.spend == 6.25);
    }
    SUBCASE("zero budget means zero level") {
        CHECK(static_for_budget(net, grp, seed, 0.0, cost, grid, 0.0).level == 0.0);
        CHECK(two_stage_for_budget(net, grp, seed, 0.0, cost, grid, 0.0).level == 0.0);
    }
}

TEST_CASE("golden section converges within the iteration budget") {
    Network net = single_node();
    Grouping grp = Grouping::single_group(1);
    CostModel cost = CostModel::quadratic(0.5, grp);
    TimeGrid grid{1.0, 100};
    std::vector<double> seed{0.0};
    HeuristicSearch search;
    HeuristicResult res = best_static(net, grp, seed, 0.0, cost, grid, search);
    const int golden_bound = static_cast<int>(
        std::ceil(std::log(search.u_max / search.tol) / std::log(1.618)));
    constexpr int kScanPoints = 9;
    CHECK(res.evaluations <= golden_bound + kScanPoints);
    CHECK(res.evaluations <= search.max_evaluations);
}

TEST_CASE("boundary maximizer raises the warning") {
    Network net = single_node();
    Grouping grp = Grouping::single_group(1);
    // nearly free control: optimum far beyond the tiny search bound
    CostModel cost = CostModel::quadratic(1e-4, grp);
    TimeGrid grid{1.0, 100};
    std::vector<double> seed{0.0};
    HeuristicSearch search;
    search.u_max = 0.5;
    HeuristicResult res = best_static(net, grp, seed, 0.0, cost, grid, search);
    CHECK(res.boundary_warning);
}

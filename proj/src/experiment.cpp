#include "epictrl/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "epictrl/budget.hpp"
#include "epictrl/centrality.hpp"
#include "epictrl/heuristics.hpp"
#include "epictrl/mc.hpp"
#include "epictrl/seed_opt.hpp"
#include "epictrl/sweep.hpp"
#include "epictrl/version.hpp"

namespace epictrl {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t used = 0;
        double v = std::stod(item, &used);
        if (used != item.size()) throw std::invalid_argument("bad number in list: " + item);
        values.push_back(v);
    }
    if (values.empty()) throw std::invalid_argument("empty value list");
    return values;
}

json config_echo(const ExperimentConfig& cfg) {
    return json{{"graph", cfg.graph_path},
                {"giant", cfg.giant},
                {"measure", cfg.measure},
                {"betweenness_mode", cfg.betweenness_mode},
                {"groups", cfg.groups},
                {"beta", cfg.beta},
                {"b", cfg.b},
                {"horizon", cfg.horizon},
                {"steps", cfg.steps},
                {"seed_frac", cfg.seed_frac},
                {"seed_groups", cfg.seed_groups},
                {"seed_budget", cfg.seed_budget},
                {"u_th", cfg.u_th},
                {"max_iter", cfg.max_iter},
                {"damping", cfg.damping},
                {"budget", cfg.budget},
                {"mu_lo", cfg.mu_lo},
                {"mu_hi", cfg.mu_hi},
                {"mu_th", cfg.mu_th},
                {"spend_rtol", cfg.spend_rtol},
                {"outer_iters", cfg.outer_iters},
                {"fd_step", cfg.fd_step},
                {"heuristic_kind", cfg.heuristic_kind},
                {"heuristic_budget", cfg.heuristic_budget},
                {"u_max", cfg.u_max},
                {"search_tol", cfg.search_tol},
                {"max_evals", cfg.max_evals},
                {"runs", cfg.runs},
                {"substeps", cfg.substeps},
                {"histogram_bins", cfg.histogram_bins},
                {"emit_adjoint", cfg.emit_adjoint},
                {"controls", cfg.controls_path},
                {"rng_seed", cfg.rng_seed},
                {"out", cfg.out}};
}

json tool_stamp() {
    return json{{"name", kToolName}, {"version", kToolVersion}, {"format", kFormatVersion}};
}

json report_json(const SolveReport& r) {
    return json{{"J", r.J},
                {"reach", r.reach},
                {"spend", r.spend},
                {"per_group_spend", r.per_group_spend},
                {"iterations", r.iterations},
                {"converged", r.converged},
                {"final_control_delta", r.final_control_delta},
                {"max_stationarity_residual", r.max_stationarity_residual},
                {"min_adjoint", r.min_adjoint}};
}

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

/// Sibling path with a fixed filename next to the primary output.
fs::path sibling(const std::string& primary, const char* name) {
    fs::path p(primary);
    return p.has_parent_path() ? p.parent_path() / name : fs::path(name);
}

void write_group_series_csv(const fs::path& path, const GroupSeries& series) {
    auto out = open_out(path);
    for (std::int32_t k = 0; k <= series.grid().steps; ++k) {
        const std::string t = fmt17(series.grid().time_at(k));
        for (std::int32_t m = 0; m < series.rows(); ++m)
            out << t << ',' << m << ',' << fmt17(series.at(m, k)) << '\n';
    }
}

void write_trajectory_csv(const fs::path& path, const Trajectory& traj) {
    auto out = open_out(path);
    for (std::int32_t k = 0; k <= traj.grid().steps; ++k) {
        const std::string t = fmt17(traj.grid().time_at(k));
        for (std::int32_t j = 0; j < traj.nodes(); ++j)
            out << t << ',' << j << ',' << fmt17(traj.at(j, k)) << '\n';
    }
}

void write_per_capita_csv(const fs::path& path, const ControlSchedule& ctrl,
                          const CostModel& cost) {
    auto out = open_out(path);
    for (std::int32_t m = 0; m < ctrl.rows(); ++m)
        out << m << ',' << fmt17(per_capita_resource(ctrl, cost, m)) << '\n';
}

GroupSeries read_group_series_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::vector<double> times;
    std::vector<std::pair<std::pair<std::int32_t, std::int32_t>, double>> entries; // (k,m)->v
    std::int32_t max_group = -1;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string t_str, m_str, v_str;
        if (!std::getline(ss, t_str, ',') || !std::getline(ss, m_str, ',') ||
            !std::getline(ss, v_str))
            throw std::runtime_error("bad schedule row: " + line);
        double t = std::stod(t_str);
        std::int32_t m = std::stoi(m_str);
        double v = std::stod(v_str);
        if (times.empty() || t > times.back() + 1e-15) {
            if (!times.empty() && m != 0)
                throw std::runtime_error("schedule rows must be grouped by time");
            times.push_back(t);
        }
        max_group = std::max(max_group, m);
        entries.push_back({{static_cast<std::int32_t>(times.size()) - 1, m}, v});
    }
    if (times.size() < 2 || max_group < 0) throw std::runtime_error("schedule file too short");

    TimeGrid grid{times.back(), static_cast<std::int32_t>(times.size()) - 1};
    grid.validate();
    const double dt = grid.dt();
    for (std::size_t k = 0; k < times.size(); ++k)
        if (std::abs(times[k] - static_cast<double>(k) * dt) > 1e-9 * std::max(1.0, grid.horizon))
            throw std::runtime_error("schedule grid is not uniform");

    GroupSeries series(grid, max_group + 1);
    std::vector<char> seen(static_cast<std::size_t>(grid.points()) * (max_group + 1), 0);
    for (auto& [km, v] : entries) {
        series.at(km.second, km.first) = v;
        seen[static_cast<std::size_t>(km.first) * (max_group + 1) + km.second] = 1;
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end())
        throw std::runtime_error("schedule file has missing entries");
    return series;
}

void validate_common(const ExperimentConfig& cfg) {
    if (cfg.graph_path.empty()) throw std::invalid_argument("missing --graph");
    if (cfg.groups < 1) throw std::invalid_argument("invalid --groups: need at least 1 group");
    if (!(cfg.beta >= 0.0)) throw std::invalid_argument("invalid --beta: must be nonnegative");
    if (!(cfg.b > 0.0)) throw std::invalid_argument("invalid --b: must be positive");
    if (!(cfg.horizon > 0.0)) throw std::invalid_argument("invalid --horizon: must be positive");
    if (cfg.steps < 1) throw std::invalid_argument("invalid --steps: need at least 1");
}

/// Everything the solvers consume, resolved from the config.
struct Problem {
    Network net;
    Grouping grp = Grouping::single_group(1);
    CostModel cost;
    TimeGrid grid;
    std::vector<double> node_seed;
    SeedVector seeds; // per-group view of the seed
    CentralityScores scores;
};

Network load_network(const ExperimentConfig& cfg) {
    LoadStats stats;
    Network net = load_edge_list_file(cfg.graph_path, &stats);
    if (stats.self_loops_dropped > 0)
        std::cerr << "warning: dropped " << stats.self_loops_dropped << " self-loop(s) from "
                  << cfg.graph_path << "\n";
    if (cfg.giant) net = giant_component(net).graph;
    return net;
}

CentralityScores score_network(const Network& net, const ExperimentConfig& cfg) {
    Measure m = measure_from_string(cfg.measure);
    if (m == Measure::betweenness) {
        if (cfg.betweenness_mode == "fractional")
            return betweenness_centrality(net, BetweennessSemantics::fractional, cfg.exec);
        if (cfg.betweenness_mode == "indicator")
            return betweenness_centrality(net, BetweennessSemantics::indicator, cfg.exec);
        throw std::invalid_argument("invalid --betweenness-mode: " + cfg.betweenness_mode);
    }
    return compute_centrality(net, m, cfg.exec);
}

Problem prepare(const ExperimentConfig& cfg, std::optional<Network> prebuilt = std::nullopt,
                std::optional<CentralityScores> prescored = std::nullopt) {
    validate_common(cfg);
    Problem prob;
    prob.net = prebuilt ? std::move(*prebuilt) : load_network(cfg);
    if (cfg.groups > prob.net.node_count())
        throw std::invalid_argument("invalid --groups: more groups than nodes");
    prob.scores = prescored ? std::move(*prescored) : score_network(prob.net, cfg);
    prob.grp = group_by_centrality(prob.scores, cfg.groups, cfg.rng_seed);
    prob.cost = CostModel::quadratic(cfg.b, prob.grp);
    prob.grid = TimeGrid{cfg.horizon, cfg.steps};

    if (!cfg.seed_groups.empty()) {
        std::vector<double> i0 = parse_double_list(cfg.seed_groups);
        if (static_cast<std::int32_t>(i0.size()) != prob.grp.group_count())
            throw std::invalid_argument("--seed-groups needs exactly one value per group");
        double budget = 0.0;
        for (std::size_t m = 0; m < i0.size(); ++m) budget += prob.cost.p[m] * i0[m];
        prob.seeds = SeedVector::checked(std::move(i0), prob.cost.p, budget);
    } else {
        if (!(cfg.seed_frac >= 0.0 && cfg.seed_frac <= 1.0))
            throw std::invalid_argument("invalid --seed-frac: must lie in [0,1]");
        prob.seeds = SeedVector{std::vector<double>(prob.grp.group_count(), cfg.seed_frac),
                                cfg.seed_frac};
    }
    prob.node_seed = expand_seed(prob.seeds, prob.grp);
    return prob;
}

SweepParams sweep_params(const ExperimentConfig& cfg) {
    SweepParams p;
    p.u_th = cfg.u_th;
    p.max_iterations = cfg.max_iter;
    p.damping = cfg.damping;
    p.validate();
    return p;
}

template <typename Fn>
int guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    }
}

void write_solution_files(const ExperimentConfig& cfg, const ControlSchedule& ctrl,
                          const Trajectory& state, const CostModel& cost, json report) {
    report["tool"] = tool_stamp();
    report["config"] = config_echo(cfg);
    auto out = open_out(cfg.out.empty() ? fs::path("report.json") : fs::path(cfg.out));
    out << report.dump(2) << '\n';
    const std::string primary = cfg.out.empty() ? "report.json" : cfg.out;
    write_group_series_csv(sibling(primary, "controls.csv"), ctrl);
    write_trajectory_csv(sibling(primary, "trajectory.csv"), state);
    write_per_capita_csv(sibling(primary, "per_group_resource.csv"), ctrl, cost);
}

} // namespace

int run_centrality(const ExperimentConfig& cfg) {
    return guarded([&] {
        if (cfg.graph_path.empty()) throw std::invalid_argument("missing --graph");
        Network net = load_network(cfg);
        CentralityScores scores = score_network(net, cfg);

        auto write_scores = [&](std::ostream& out) {
            for (std::int32_t v = 0; v < net.node_count(); ++v)
                out << v << ',' << fmt17(scores.values[v]) << '\n';
        };
        if (cfg.out.empty()) {
            write_scores(std::cout);
        } else {
            auto out = open_out(cfg.out);
            write_scores(out);
        }
        if (cfg.groups >= 1) {
            Grouping grp = group_by_centrality(scores, cfg.groups, cfg.rng_seed);
            auto out = open_out(sibling(cfg.out.empty() ? "grouping.csv" : cfg.out, "grouping.csv"));
            for (std::int32_t v = 0; v < net.node_count(); ++v)
                out << v << ',' << grp.group_of(v) << '\n';
        }
        return kExitOk;
    });
}

int run_solve(const ExperimentConfig& cfg) {
    return guarded([&] {
        Problem prob = prepare(cfg);
        SweepSolution sol = fbs_solve(prob.net, prob.grp, prob.node_seed, cfg.beta, prob.cost,
                                      sweep_params(cfg), prob.grid, cfg.exec);
        json sizes = json::array();
        for (std::int32_t m = 0; m < prob.grp.group_count(); ++m)
            sizes.push_back(prob.grp.size(m));
        json report{{"report", report_json(sol.report)}, {"grouping", json{{"sizes", sizes}}}};
        if (cfg.emit_adjoint)
            write_trajectory_csv(sibling(cfg.out.empty() ? "report.json" : cfg.out, "adjoint.csv"),
                                 sol.adjoint);
        write_solution_files(cfg, sol.control, sol.state, prob.cost, std::move(report));
        if (!sol.report.converged) {
            std::cerr << "solver did not converge within " << cfg.max_iter
                      << " iterations (final control delta " << sol.report.final_control_delta
                      << ")\n";
            return kExitNotConverged;
        }
        return kExitOk;
    });
}

int run_solve_joint(const ExperimentConfig& cfg) {
    return guarded([&] {
        Problem prob = prepare(cfg);
        JointOptions opts;
        opts.max_outer_iterations = cfg.outer_iters;
        opts.fd_step = cfg.fd_step;
        JointSolution sol = joint_optimize(prob.net, prob.grp, cfg.seed_budget, cfg.beta,
                                           prob.cost, sweep_params(cfg), prob.grid, opts, cfg.exec);
        json report{{"report", report_json(sol.report)},
                    {"seeds", json{{"budget", sol.seeds.budget},
                                   {"i0", sol.seeds.i0},
                                   {"outer_iterations", sol.outer_iterations},
                                   {"evaluations", sol.evaluations}}}};
        const std::string primary = cfg.out.empty() ? "report.json" : cfg.out;
        {
            auto out = open_out(sibling(primary, "seed_alloc.csv"));
            for (std::size_t m = 0; m < sol.seeds.i0.size(); ++m)
                out << m << ',' << fmt17(sol.seeds.i0[m]) << '\n';
        }
        write_solution_files(cfg, sol.control, sol.state, prob.cost, std::move(report));
        return sol.report.converged ? kExitOk : kExitNotConverged;
    });
}

int run_solve_budget(const ExperimentConfig& cfg) {
    return guarded([&] {
        Problem prob = prepare(cfg);
        BudgetParams bp;
        bp.total = cfg.budget;
        bp.mu_low = cfg.mu_lo;
        bp.mu_high = cfg.mu_hi;
        bp.mu_th = cfg.mu_th;
        bp.spend_rtol = cfg.spend_rtol;
        bp.sweep = sweep_params(cfg);
        BudgetSolution sol =
            solve_budget(prob.net, prob.grp, prob.node_seed, cfg.beta, prob.cost, prob.grid, bp,
                         cfg.exec);
        json report{{"report", report_json(sol.report)},
                    {"mu_star", sol.mu_star},
                    {"outer_iterations", sol.outer_iterations},
                    {"widening_steps", sol.widening_steps}};
        write_solution_files(cfg, sol.control, sol.state, prob.cost, std::move(report));
        return sol.report.converged ? kExitOk : kExitNotConverged;
    });
}

int run_heuristic(const ExperimentConfig& cfg) {
    return guarded([&] {
        Problem prob = prepare(cfg);
        HeuristicKind kind;
        if (cfg.heuristic_kind == "static")
            kind = HeuristicKind::static_control;
        else if (cfg.heuristic_kind == "two-stage")
            kind = HeuristicKind::two_stage;
        else
            throw std::invalid_argument("invalid --kind: " + cfg.heuristic_kind);

        HeuristicResult res;
        if (cfg.heuristic_budget) {
            res = kind == HeuristicKind::static_control
                      ? static_for_budget(prob.net, prob.grp, prob.node_seed, cfg.beta, prob.cost,
                                          prob.grid, cfg.budget, cfg.exec)
                      : two_stage_for_budget(prob.net, prob.grp, prob.node_seed, cfg.beta,
                                             prob.cost, prob.grid, cfg.budget, cfg.exec);
        } else {
            HeuristicSearch search{cfg.u_max, cfg.search_tol, cfg.max_evals};
            res = kind == HeuristicKind::static_control
                      ? best_static(prob.net, prob.grp, prob.node_seed, cfg.beta, prob.cost,
                                    prob.grid, search, cfg.exec)
                      : best_two_stage(prob.net, prob.grp, prob.node_seed, cfg.beta, prob.cost,
                                       prob.grid, search, cfg.exec);
        }

        ControlSchedule ctrl =
            heuristic_schedule(res.kind, res.level, prob.grid, prob.grp.group_count());
        Trajectory state = forward_si(prob.net, prob.grp, ctrl, prob.node_seed, cfg.beta, cfg.exec);
        json report{{"heuristic", json{{"kind", cfg.heuristic_kind},
                                       {"level", res.level},
                                       {"evaluations", res.evaluations},
                                       {"boundary_warning", res.boundary_warning},
                                       {"budget_constrained", cfg.heuristic_budget}}},
                    {"report", json{{"J", res.J}, {"reach", res.reach}, {"spend", res.spend}}}};
        write_solution_files(cfg, ctrl, state, prob.cost, std::move(report));
        return kExitOk;
    });
}

int run_mc(const ExperimentConfig& cfg) {
    return guarded([&] {
        Problem prob = prepare(cfg);
        ControlSchedule ctrl = cfg.controls_path.empty()
                                   ? constant_control(prob.grid, prob.grp.group_count(), 0.0)
                                   : read_group_series_csv(cfg.controls_path);
        if (ctrl.rows() != prob.grp.group_count())
            throw std::invalid_argument("controls file group count does not match --groups");

        McParams params;
        params.runs = cfg.runs;
        params.rng_seed = cfg.rng_seed;
        params.substeps = cfg.substeps;
        params.histogram_bins = cfg.histogram_bins;
        McResult res =
            mc_simulate(prob.net, prob.grp, ctrl, prob.node_seed, cfg.beta, params, cfg.exec);

        json out{{"tool", tool_stamp()},
                 {"config", config_echo(cfg)},
                 {"result", json{{"runs", res.runs},
                                 {"mean_reach", res.mean_reach},
                                 {"stderr", res.stderr_mean},
                                 {"rng_seed", res.rng_seed}}}};
        if (res.reach_histogram) out["result"]["histogram"] = *res.reach_histogram;
        if (cfg.out.empty()) {
            std::cout << out.dump(2) << '\n';
        } else {
            auto f = open_out(cfg.out);
            f << out.dump(2) << '\n';
        }
        return kExitOk;
    });
}

namespace {

struct SweepRow {
    double axis_value = 0.0;
    std::string strategy;
    double J = NAN, reach = NAN, spend = NAN;
    bool failed = false;
};

double pct_improvement(double J, double J_static) {
    // ratio is meaningless near zero; fall back to the absolute gap
    if (std::abs(J_static) < 1e-6) return J - J_static;
    return 100.0 * (J - J_static) / std::abs(J_static);
}

} // namespace

int run_sweep(const ExperimentConfig& cfg, const std::string& axis,
              const std::vector<double>& values) {
    return guarded([&] {
        if (axis != "b" && axis != "beta" && axis != "M" && axis != "B")
            throw std::invalid_argument("invalid --axis: expected one of b, beta, M, B");
        if (values.empty()) throw std::invalid_argument("missing --values");
        validate_common(cfg);

        // graph and centrality scores are shared by every sweep point
        Network net = load_network(cfg);
        CentralityScores scores = score_network(net, cfg);

        const bool budget_axis = axis == "B";
        const std::size_t n_points = values.size();
        std::vector<std::vector<SweepRow>> point_rows(n_points);
        std::vector<std::string> point_errors(n_points);

#pragma omp parallel for schedule(dynamic) if (cfg.exec == Exec::par && n_points > 1)
        for (std::size_t i = 0; i < n_points; ++i) {
            ExperimentConfig point_cfg = cfg;
            const double value = values[i];
            try {
                if (axis == "b")
                    point_cfg.b = value;
                else if (axis == "beta")
                    point_cfg.beta = value;
                else if (axis == "M")
                    point_cfg.groups = static_cast<int>(value);
                else
                    point_cfg.budget = value;

                Problem prob = prepare(point_cfg, net, scores);
                auto& rows = point_rows[i];

                auto add = [&](const std::string& strategy, auto&& compute) {
                    SweepRow row;
                    row.axis_value = value;
                    row.strategy = strategy;
                    try {
                        auto [J, reach, spend] = compute();
                        row.J = J;
                        row.reach = reach;
                        row.spend = spend;
                    } catch (const std::exception& e) {
                        row.failed = true;
#pragma omp critical(epictrl_sweep_log)
                        std::cerr << "sweep point " << axis << "=" << value << " strategy "
                                  << strategy << " failed: " << e.what() << "\n";
                    }
                    rows.push_back(std::move(row));
                };

                if (budget_axis) {
                    BudgetParams bp;
                    bp.total = value;
                    bp.mu_low = point_cfg.mu_lo;
                    bp.mu_high = point_cfg.mu_hi;
                    bp.mu_th = point_cfg.mu_th;
                    bp.spend_rtol = point_cfg.spend_rtol;
                    bp.sweep = sweep_params(point_cfg);
                    // constrained objective is reach; all strategies spend B
                    add("optimal", [&] {
                        BudgetSolution s = solve_budget(prob.net, prob.grp, prob.node_seed,
                                                        point_cfg.beta, prob.cost, prob.grid, bp,
                                                        point_cfg.exec);
                        return std::tuple{s.report.reach, s.report.reach, s.report.spend};
                    });
                    add("static", [&] {
                        HeuristicResult h =
                            static_for_budget(prob.net, prob.grp, prob.node_seed, point_cfg.beta,
                                              prob.cost, prob.grid, value, point_cfg.exec);
                        return std::tuple{h.J, h.reach, h.spend};
                    });
                    add("two_stage", [&] {
                        HeuristicResult h = two_stage_for_budget(prob.net, prob.grp,
                                                                 prob.node_seed, point_cfg.beta,
                                                                 prob.cost, prob.grid, value,
                                                                 point_cfg.exec);
                        return std::tuple{h.J, h.reach, h.spend};
                    });
                } else {
                    SweepParams sp = sweep_params(point_cfg);
                    add("optimal", [&] {
                        SweepSolution s = fbs_solve(prob.net, prob.grp, prob.node_seed,
                                                    point_cfg.beta, prob.cost, sp, prob.grid,
                                                    point_cfg.exec);
                        return std::tuple{s.report.J, s.report.reach, s.report.spend};
                    });
                    add("joint", [&] {
                        JointOptions opts;
                        opts.max_outer_iterations = point_cfg.outer_iters;
                        opts.fd_step = point_cfg.fd_step;
                        JointSolution s =
                            joint_optimize(prob.net, prob.grp, point_cfg.seed_frac, point_cfg.beta,
                                           prob.cost, sp, prob.grid, opts, point_cfg.exec);
                        return std::tuple{s.report.J, s.report.reach, s.report.spend};
                    });
                    HeuristicSearch search{point_cfg.u_max, point_cfg.search_tol,
                                           point_cfg.max_evals};
                    add("static", [&] {
                        HeuristicResult h =
                            best_static(prob.net, prob.grp, prob.node_seed, point_cfg.beta,
                                        prob.cost, prob.grid, search, point_cfg.exec);
                        return std::tuple{h.J, h.reach, h.spend};
                    });
                    add("two_stage", [&] {
                        HeuristicResult h =
                            best_two_stage(prob.net, prob.grp, prob.node_seed, point_cfg.beta,
                                           prob.cost, prob.grid, search, point_cfg.exec);
                        return std::tuple{h.J, h.reach, h.spend};
                    });
                }
            } catch (const std::exception& e) {
                point_errors[i] = e.what();
            }
        }

        // single collector writes the rows in axis order
        auto out = cfg.out.empty() ? open_out("sweep.csv") : open_out(cfg.out);
        for (std::size_t i = 0; i < n_points; ++i) {
            if (!point_errors[i].empty()) {
                std::cerr << "sweep point " << axis << "=" << values[i]
                          << " failed: " << point_errors[i] << "\n";
                out << fmt17(values[i]) << ",error,nan,nan,nan,nan\n";
                continue;
            }
            double J_static = NAN;
            for (const SweepRow& row : point_rows[i])
                if (row.strategy == "static" && !row.failed) J_static = row.J;
            for (const SweepRow& row : point_rows[i]) {
                const double pct = (row.failed || std::isnan(J_static))
                                       ? NAN
                                       : pct_improvement(row.J, J_static);
                out << fmt17(row.axis_value) << ',' << row.strategy << ',' << fmt17(row.J) << ','
                    << fmt17(row.reach) << ',' << fmt17(row.spend) << ',' << fmt17(pct) << '\n';
            }
        }
        return kExitOk;
    });
}

int run_graph(const ExperimentConfig& cfg, int bfs_start, int bfs_target,
              const std::string& map_out) {
    return guarded([&] {
        if (cfg.graph_path.empty()) throw std::invalid_argument("missing --graph");
        LoadStats stats;
        Network net = load_edge_list_file(cfg.graph_path, &stats);
        if (stats.self_loops_dropped > 0)
            std::cerr << "warning: dropped " << stats.self_loops_dropped << " self-loop(s)\n";

        // composed map: position = loaded id, value = id in the output graph
        std::vector<std::int32_t> to_final(net.node_count());
        for (std::int32_t v = 0; v < net.node_count(); ++v) to_final[v] = v;

        if (cfg.giant) {
            ComponentResult comp = giant_component(net);
            for (auto& m : to_final) m = m >= 0 ? comp.old_to_new[m] : -1;
            net = std::move(comp.graph);
        }
        if (bfs_target > 0) {
            std::vector<std::int32_t> sample_map;
            Network sampled = bfs_sample(net, bfs_start, bfs_target, &sample_map);
            for (auto& m : to_final) m = m >= 0 ? sample_map[m] : -1;
            net = std::move(sampled);
        }

        if (cfg.out.empty()) {
            save_edge_list(net, std::cout);
        } else {
            auto out = open_out(cfg.out);
            save_edge_list(net, out);
        }
        if (!map_out.empty()) {
            auto out = open_out(map_out);
            for (std::size_t i = 0; i < to_final.size(); ++i)
                if (to_final[i] >= 0)
                    out << stats.original_ids[i] << ',' << to_final[i] << '\n';
        }
        return kExitOk;
    });
}

} // namespace epictrl

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "epictrl/experiment.hpp"
#include "epictrl/version.hpp"

namespace {

using epictrl::ExperimentConfig;

/// Expands `--config FILE` into ordinary long options: each `key=value` line
/// becomes `--key=value` unless the flag already appears on the command
/// line, so explicit flags always win. Returns false on a bad file.
bool merge_config_files(std::vector<std::string>& args) {
    std::vector<std::string> merged;
    std::vector<std::string> from_file;
    auto have_flag = [&args](const std::string& key) {
        const std::string plain = "--" + key;
        const std::string assigned = plain + "=";
        for (const std::string& a : args)
            if (a == plain || a.rfind(assigned, 0) == 0) return true;
        return false;
    };
    for (std::size_t i = 0; i < args.size(); ++i) {
        std::string path;
        if (args[i] == "--config" && i + 1 < args.size())
            path = args[++i];
        else if (args[i].rfind("--config=", 0) == 0)
            path = args[i].substr(9);
        else {
            merged.push_back(args[i]);
            continue;
        }
        std::ifstream in(path);
        if (!in) {
            std::cerr << "error: cannot read config file " << path << "\n";
            return false;
        }
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            std::size_t begin = line.find_first_not_of(" \t\r");
            if (begin == std::string::npos || line[begin] == '#') continue;
            std::size_t eq = line.find('=', begin);
            if (eq == std::string::npos) {
                std::cerr << "error: " << path << ":" << line_no << ": expected key=value\n";
                return false;
            }
            std::string key = line.substr(begin, eq - begin);
            while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
            std::string value = line.substr(eq + 1);
            std::size_t vstart = value.find_first_not_of(" \t");
            value = vstart == std::string::npos ? std::string() : value.substr(vstart);
            while (!value.empty() && (value.back() == ' ' || value.back() == '\t' ||
                                      value.back() == '\r'))
                value.pop_back();
            if (!have_flag(key)) from_file.push_back("--" + key + "=" + value);
        }
    }
    merged.insert(merged.end(), from_file.begin(), from_file.end());
    args = std::move(merged);
    return true;
}

void add_graph_options(CLI::App* cmd, ExperimentConfig& cfg) {
    cmd->add_option("--config", "key=value config file; command-line flags win on conflict")
        ->type_name("FILE");
    cmd->add_option("--graph", cfg.graph_path, "edge list file ('#' comments, \"u v\" lines)");
    cmd->add_flag("--giant", cfg.giant, "reduce to the giant component after loading");
}

void add_grouping_options(CLI::App* cmd, ExperimentConfig& cfg) {
    cmd->add_option("--measure", cfg.measure,
                    "centrality measure: degree, closeness, betweenness, pagerank");
    cmd->add_option("--betweenness-mode", cfg.betweenness_mode,
                    "betweenness semantics: fractional (Brandes) or indicator");
    cmd->add_option("--groups", cfg.groups, "number of control groups M");
    cmd->add_option("--rng-seed", cfg.rng_seed, "seed for every random choice in the run");
}

void add_model_options(CLI::App* cmd, ExperimentConfig& cfg) {
    cmd->add_option("--beta", cfg.beta, "information spreading rate");
    cmd->add_option("--b", cfg.b, "control cost weight in g_m(u) = b p_m u^2");
    cmd->add_option("--horizon", cfg.horizon, "campaign deadline T");
    cmd->add_option("--steps", cfg.steps, "time grid steps K");
}

void add_seed_options(CLI::App* cmd, ExperimentConfig& cfg) {
    cmd->add_option("--seed-frac", cfg.seed_frac, "uniform seed fraction for every group");
    cmd->add_option("--seed-groups", cfg.seed_groups,
                    "comma-separated per-group seed fractions (overrides --seed-frac)");
}

void add_sweep_solver_options(CLI::App* cmd, ExperimentConfig& cfg) {
    cmd->add_option("--uth", cfg.u_th, "sup-norm control change accepted as converged");
    cmd->add_option("--maxiter", cfg.max_iter, "max forward-backward sweep iterations P");
    cmd->add_option("--damping", cfg.damping, "control update damping in (0,1]; 1 = undamped");
}

void add_out_option(CLI::App* cmd, ExperimentConfig& cfg, const char* what) {
    cmd->add_option("--out", cfg.out, what);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"optimal seeding and time-varying resource allocation for SI campaigns on networks"};
    app.set_version_flag("--version", std::string(epictrl::kToolName) + " " +
                                          epictrl::kToolVersion + " (format " +
                                          std::to_string(epictrl::kFormatVersion) + ")");
    app.require_subcommand(1);

    ExperimentConfig cfg;
    std::string axis;
    std::string values_list;
    std::string map_out;
    int bfs_start = 0;
    int bfs_target = 0;

    auto* centrality = app.add_subcommand("centrality", "compute node centrality scores");
    add_graph_options(centrality, cfg);
    centrality->add_option("--measure", cfg.measure,
                           "centrality measure: degree, closeness, betweenness, pagerank");
    centrality->add_option("--betweenness-mode", cfg.betweenness_mode,
                           "betweenness semantics: fractional (Brandes) or indicator");
    int centrality_groups = 0; // scores only unless groups are requested
    centrality->add_option("--groups", centrality_groups, "also write grouping.csv for M groups");
    centrality->add_option("--rng-seed", cfg.rng_seed, "seed for grouping tie breaks");
    add_out_option(centrality, cfg, "scores CSV path (stdout if omitted)");

    auto* solve = app.add_subcommand("solve", "optimal controls for a given seed");
    add_graph_options(solve, cfg);
    add_grouping_options(solve, cfg);
    add_model_options(solve, cfg);
    add_seed_options(solve, cfg);
    add_sweep_solver_options(solve, cfg);
    solve->add_flag("--emit-adjoint", cfg.emit_adjoint, "also write adjoint.csv");
    add_out_option(solve, cfg, "report JSON path; CSVs are written next to it");

    auto* joint = app.add_subcommand("solve-joint", "jointly optimize seeds and controls");
    add_graph_options(joint, cfg);
    add_grouping_options(joint, cfg);
    add_model_options(joint, cfg);
    add_sweep_solver_options(joint, cfg);
    joint->add_option("--seed-budget", cfg.seed_budget, "total seed fraction i0");
    joint->add_option("--outer-iters", cfg.outer_iters, "max gradient-ascent iterations L");
    joint->add_option("--fd-step", cfg.fd_step, "finite-difference step for the seed gradient");
    add_out_option(joint, cfg, "report JSON path; CSVs are written next to it");

    auto* budget = app.add_subcommand("solve-budget", "optimal controls under a spend budget");
    add_graph_options(budget, cfg);
    add_grouping_options(budget, cfg);
    add_model_options(budget, cfg);
    add_seed_options(budget, cfg);
    add_sweep_solver_options(budget, cfg);
    budget->add_option("--budget", cfg.budget, "total resource budget B")->required();
    budget->add_option("--mu-lo", cfg.mu_lo, "initial lower multiplier guess");
    budget->add_option("--mu-hi", cfg.mu_hi, "initial upper multiplier guess");
    budget->add_option("--mu-th", cfg.mu_th, "multiplier bracket tolerance");
    budget->add_option("--spend-rtol", cfg.spend_rtol, "|spend-B|/B accepted as matched");
    add_out_option(budget, cfg, "report JSON path; CSVs are written next to it");

    auto* heuristic = app.add_subcommand("heuristic", "best static or two-stage control");
    add_graph_options(heuristic, cfg);
    add_grouping_options(heuristic, cfg);
    add_model_options(heuristic, cfg);
    add_seed_options(heuristic, cfg);
    heuristic->add_option("--kind", cfg.heuristic_kind, "static or two-stage")->required();
    heuristic->add_option("--budget", cfg.budget,
                          "fix the level from this budget instead of searching");
    heuristic->add_option("--u-max", cfg.u_max, "search upper bound for the level");
    heuristic->add_option("--tol", cfg.search_tol, "golden-section bracket tolerance");
    heuristic->add_option("--max-evals", cfg.max_evals, "objective evaluation cap S");
    add_out_option(heuristic, cfg, "report JSON path; CSVs are written next to it");

    auto* mc = app.add_subcommand("mc-validate", "stochastic simulation oracle for a schedule");
    add_graph_options(mc, cfg);
    add_grouping_options(mc, cfg);
    add_model_options(mc, cfg);
    add_seed_options(mc, cfg);
    mc->add_option("--runs", cfg.runs, "number of Monte-Carlo runs");
    mc->add_option("--substeps", cfg.substeps, "subdivisions of each grid cell");
    mc->add_option("--histogram-bins", cfg.histogram_bins,
                   "include a final-reach histogram with this many bins");
    mc->add_option("--controls", cfg.controls_path,
                   "controls.csv (t,group,value) to validate; zero control if omitted");
    add_out_option(mc, cfg, "result JSON path (stdout if omitted)");

    auto* sweep = app.add_subcommand("sweep", "compare strategies while varying one parameter");
    add_graph_options(sweep, cfg);
    add_grouping_options(sweep, cfg);
    add_model_options(sweep, cfg);
    add_seed_options(sweep, cfg);
    add_sweep_solver_options(sweep, cfg);
    sweep->add_option("--axis", axis, "parameter to vary: b, beta, M, or B")->required();
    sweep->add_option("--values", values_list, "comma-separated axis values")->required();
    sweep->add_option("--outer-iters", cfg.outer_iters, "joint optimizer iteration cap");
    sweep->add_option("--u-max", cfg.u_max, "heuristic search bound");
    sweep->add_option("--mu-lo", cfg.mu_lo, "budget solver lower multiplier guess");
    sweep->add_option("--mu-hi", cfg.mu_hi, "budget solver upper multiplier guess");
    sweep->add_option("--mu-th", cfg.mu_th, "budget solver bracket tolerance");
    add_out_option(sweep, cfg, "sweep CSV path");

    auto* graph = app.add_subcommand("graph", "load, sample, and save a graph");
    add_graph_options(graph, cfg);
    graph->add_option("--bfs-start", bfs_start, "BFS sampling start node (after --giant)");
    graph->add_option("--bfs-target", bfs_target, "BFS sample size (0 = no sampling)");
    graph->add_option("--map-out", map_out, "write the old,new relabel map CSV here");
    add_out_option(graph, cfg, "output edge list path (stdout if omitted)");

    std::vector<std::string> args(argv + 1, argv + argc);
    if (!merge_config_files(args)) return epictrl::kExitConfigError;
    std::reverse(args.begin(), args.end()); // CLI11's vector overload wants reversed args
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return epictrl::kExitConfigError;
    }

    if (app.got_subcommand(centrality)) {
        cfg.groups = centrality_groups;
        return epictrl::run_centrality(cfg);
    }
    if (app.got_subcommand(solve)) return epictrl::run_solve(cfg);
    if (app.got_subcommand(joint)) return epictrl::run_solve_joint(cfg);
    if (app.got_subcommand(budget)) return epictrl::run_solve_budget(cfg);
    if (app.got_subcommand(heuristic)) {
        cfg.heuristic_budget = heuristic->count("--budget") > 0;
        return epictrl::run_heuristic(cfg);
    }
    if (app.got_subcommand(mc)) return epictrl::run_mc(cfg);
    if (app.got_subcommand(sweep)) {
        std::vector<double> values;
        try {
            std::stringstream ss(values_list);
            std::string item;
            while (std::getline(ss, item, ','))
                if (!item.empty()) values.push_back(std::stod(item));
        } catch (const std::exception&) {
            std::cerr << "error: invalid --values list\n";
            return epictrl::kExitConfigError;
        }
        return epictrl::run_sweep(cfg, axis, values);
    }
    if (app.got_subcommand(graph)) return epictrl::run_graph(cfg, bfs_start, bfs_target, map_out);
    return epictrl::kExitConfigError;
}

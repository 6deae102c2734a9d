#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "epictrl/exec.hpp"

namespace epictrl {

/// Exit codes shared by the CLI entry points.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitNotConverged = 3;

/// Everything a run needs, resolved from flags and/or a key=value config
/// file. Fields are validated against the owning module's preconditions
/// before any computation starts.
struct ExperimentConfig {
    // graph ingestion
    std::string graph_path;
    bool giant = false; // reduce to the giant component after loading

    // grouping
    std::string measure = "degree";
    std::string betweenness_mode = "fractional"; // or "indicator"
    int groups = 5;

    // model
    double beta = 0.1;
    double b = 25.0;
    double horizon = 1.0;
    int steps = 200;

    // seeding
    double seed_frac = 0.01;      // uniform per-group seed fraction
    std::string seed_groups;      // comma-separated per-group fractions (overrides seed_frac)
    double seed_budget = 0.01;    // joint mode total seed budget

    // sweep solver
    double u_th = 1e-6;
    int max_iter = 200;
    double damping = 0.5;

    // fixed-budget solver
    double budget = 1.0;
    double mu_lo = 1e-2;
    double mu_hi = 10.0;
    double mu_th = 1e-4;
    double spend_rtol = 1e-3;

    // joint optimization
    int outer_iters = 50;
    double fd_step = 1e-3;

    // heuristics
    std::string heuristic_kind = "static"; // or "two-stage"
    bool heuristic_budget = false;         // pick the level from the budget instead of searching
    double u_max = 10.0;
    double search_tol = 1e-5;
    int max_evals = 200;

    // Monte-Carlo validation
    long long runs = 10000;
    int substeps = 4;
    int histogram_bins = 0;    // 0 = no histogram in the result
    std::string controls_path; // optional controls.csv to validate; empty = zero control

    bool emit_adjoint = false; // also write adjoint.csv next to the report
    std::uint64_t rng_seed = 12345;
    std::string out; // primary output file; siblings are written next to it
    Exec exec = Exec::par;
};

/// Each entry point validates, computes, writes its files, and returns an
/// exit code; problems are reported on stderr.
int run_centrality(const ExperimentConfig& cfg);
int run_solve(const ExperimentConfig& cfg);
int run_solve_joint(const ExperimentConfig& cfg);
int run_solve_budget(const ExperimentConfig& cfg);
int run_heuristic(const ExperimentConfig& cfg);
int run_mc(const ExperimentConfig& cfg);

/// One row per (axis value, strategy): axis_value,strategy,J,reach,spend,
/// pct_improvement_vs_static. Axis is one of "b", "beta", "M", "B".
int run_sweep(const ExperimentConfig& cfg, const std::string& axis,
              const std::vector<double>& values);

/// Graph utility: load, optionally reduce to the giant component and/or
/// BFS-sample, save the result and the old->new relabel map.
int run_graph(const ExperimentConfig& cfg, int bfs_start, int bfs_target,
              const std::string& map_out);

/// Full-precision decimal formatting used in every CSV (17 significant
/// digits round-trips IEEE doubles).
std::string fmt17(double v);

} // namespace epictrl

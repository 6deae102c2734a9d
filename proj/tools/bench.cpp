// Compares the serial reference kernels against their OpenMP versions on a
// synthetic preferential-attachment graph and reports timings and speedups.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>

#include "epictrl/adjoint.hpp"
#include "epictrl/centrality.hpp"
#include "epictrl/dynamics.hpp"
#include "epictrl/mc.hpp"

using namespace epictrl;

namespace {

double time_ms(const std::function<void()>& fn, int repeats = 3) {
    double best = 1e300;
    for (int r = 0; r < repeats; ++r) {
        auto t0 = std::chrono::steady_clock::now();
        fn();
        auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return best;
}

void report(const char* name, double serial_ms, double parallel_ms, double check) {
    std::printf("%-22s %10.2f ms %10.2f ms %8.2fx   max|diff| %.3g\n", name, serial_ms,
                parallel_ms, serial_ms / parallel_ms, check);
}

double max_diff(std::span<const double> a, std::span<const double> b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

} // namespace

int main() {
    std::printf("%-22s %13s %13s %9s\n", "kernel", "serial", "openmp", "speedup");

    // dynamics-scale instance
    {
        Network net = generate_preferential_attachment(20000, 3, 7);
        Grouping grp = group_by_centrality(degree_centrality(net), 10, 7);
        TimeGrid grid{1.0, 200};
        ControlSchedule ctrl = constant_control(grid, 10, 0.3);
        std::vector<double> seed(net.node_count(), 0.01);

        Trajectory st_seq, st_par;
        double s = time_ms([&] { st_seq = forward_si(net, grp, ctrl, seed, 0.05, Exec::seq); });
        double p = time_ms([&] { st_par = forward_si(net, grp, ctrl, seed, 0.05, Exec::par); });
        report("forward_si", s, p, max_diff(st_seq.series.raw(), st_par.series.raw()));

        Trajectory ad_seq, ad_par;
        s = time_ms([&] { ad_seq = backward_adjoint(net, grp, ctrl, st_seq, 0.05, Exec::seq); });
        p = time_ms([&] { ad_par = backward_adjoint(net, grp, ctrl, st_par, 0.05, Exec::par); });
        report("backward_adjoint", s, p, max_diff(ad_seq.series.raw(), ad_par.series.raw()));

        CentralityScores pr_seq, pr_par;
        s = time_ms([&] { pr_seq = pagerank_centrality(net, {}, Exec::seq); });
        p = time_ms([&] { pr_par = pagerank_centrality(net, {}, Exec::par); });
        report("pagerank", s, p, max_diff(pr_seq.values, pr_par.values));

        McParams mc;
        mc.runs = 400;
        McResult mc_seq, mc_par;
        s = time_ms([&] { mc_seq = mc_simulate(net, grp, ctrl, seed, 0.05, mc, Exec::seq); }, 1);
        p = time_ms([&] { mc_par = mc_simulate(net, grp, ctrl, seed, 0.05, mc, Exec::par); }, 1);
        report("mc_simulate", s, p, std::abs(mc_seq.mean_reach - mc_par.mean_reach));
    }

    // all-pairs-scale instance
    {
        Network net = generate_preferential_attachment(2000, 3, 7);
        CentralityScores bw_seq, bw_par;
        double s = time_ms(
            [&] { bw_seq = betweenness_centrality(net, BetweennessSemantics::fractional, Exec::seq); });
        double p = time_ms(
            [&] { bw_par = betweenness_centrality(net, BetweennessSemantics::fractional, Exec::par); });
        report("betweenness", s, p, max_diff(bw_seq.values, bw_par.values));

        CentralityScores cl_seq, cl_par;
        s = time_ms([&] { cl_seq = closeness_centrality(net, Exec::seq); });
        p = time_ms([&] { cl_par = closeness_centrality(net, Exec::par); });
        report("closeness", s, p, max_diff(cl_seq.values, cl_par.values));
    }
    return 0;
}

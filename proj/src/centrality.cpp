#include "epictrl/centrality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "epictrl/rng.hpp"

namespace epictrl {

Measure measure_from_string(const std::string& name) {
    if (name == "degree") return Measure::degree;
    if (name == "closeness") return Measure::closeness;
    if (name == "betweenness") return Measure::betweenness;
    if (name == "pagerank") return Measure::pagerank;
    throw std::invalid_argument("unknown centrality measure: " + name);
}

std::string to_string(Measure m) {
    switch (m) {
    case Measure::degree: return "degree";
    case Measure::closeness: return "closeness";
    case Measure::betweenness: return "betweenness";
    case Measure::pagerank: return "pagerank";
    }
    return "?";
}

CentralityScores degree_centrality(const Network& net) {
    CentralityScores scores;
    scores.measure = Measure::degree;
    scores.values.resize(net.node_count());
    for (std::int32_t v = 0; v < net.node_count(); ++v)
        scores.values[v] = static_cast<double>(net.degree(v));
    return scores;
}

namespace {

constexpr std::int32_t kUnreached = -1;

/// BFS distances from `source`; returns the sum of distances, or -1 if some
/// node is unreachable.
std::int64_t bfs_distance_sum(const Network& net, std::int32_t source,
                              std::vector<std::int32_t>& dist,
                              std::vector<std::int32_t>& order) {
    const std::int32_t n = net.node_count();
    dist.assign(n, kUnreached);
    order.clear();
    order.push_back(source);
    dist[source] = 0;
    std::int64_t sum = 0;
    for (std::size_t head = 0; head < order.size(); ++head) {
        std::int32_t v = order[head];
        for (std::int32_t w : net.neighbors(v))
            if (dist[w] == kUnreached) {
                dist[w] = dist[v] + 1;
                sum += dist[w];
                order.push_back(w);
            }
    }
    if (static_cast<std::int32_t>(order.size()) != n) return -1;
    return sum;
}

/// One Brandes source pass: accumulates pair dependencies into `accum`.
void brandes_pass(const Network& net, std::int32_t source, std::vector<std::int32_t>& dist,
                  std::vector<std::int32_t>& order, std::vector<double>& sigma,
                  std::vector<double>& delta, std::vector<double>& accum) {
    const std::int32_t n = net.node_count();
    dist.assign(n, kUnreached);
    sigma.assign(n, 0.0);
    delta.assign(n, 0.0);
    order.clear();
    order.push_back(source);
    dist[source] = 0;
    sigma[source] = 1.0;
    for (std::size_t head = 0; head < order.size(); ++head) {
        std::int32_t v = order[head];
        for (std::int32_t w : net.neighbors(v)) {
            if (dist[w] == kUnreached) {
                dist[w] = dist[v] + 1;
                order.push_back(w);
            }
            if (dist[w] == dist[v] + 1) sigma[w] += sigma[v];
        }
    }
    for (std::size_t idx = order.size(); idx-- > 1;) {
        std::int32_t w = order[idx];
        for (std::int32_t v : net.neighbors(w))
            if (dist[v] == dist[w] - 1) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
        accum[w] += delta[w];
    }
}

std::vector<double> brandes_serial(const Network& net) {
    const std::int32_t n = net.node_count();
    std::vector<double> accum(n, 0.0);
    std::vector<std::int32_t> dist, order;
    std::vector<double> sigma, delta;
    for (std::int32_t s = 0; s < n; ++s)
        brandes_pass(net, s, dist, order, sigma, delta, accum);
    for (double& a : accum) a *= 0.5; // ordered -> unordered pairs
    return accum;
}

std::vector<double> brandes_parallel(const Network& net) {
    const std::int32_t n = net.node_count();
#ifdef _OPENMP
    const int threads = omp_get_max_threads();
#else
    const int threads = 1;
#endif
    std::vector<std::vector<double>> partial(threads, std::vector<double>(n, 0.0));
#pragma omp parallel
    {
#ifdef _OPENMP
        const int tid = omp_get_thread_num();
#else
        const int tid = 0;
#endif
        std::vector<std::int32_t> dist, order;
        std::vector<double> sigma, delta;
#pragma omp for schedule(static)
        for (std::int32_t s = 0; s < n; ++s)
            brandes_pass(net, s, dist, order, sigma, delta, partial[tid]);
    }
    std::vector<double> accum(n, 0.0);
    for (const auto& part : partial)
        for (std::int32_t v = 0; v < n; ++v) accum[v] += part[v];
    for (double& a : accum) a *= 0.5;
    return accum;
}

std::vector<double> betweenness_indicator(const Network& net, Exec exec) {
    const std::int32_t n = net.node_count();
    // all-pairs distances; meant for modest n
    std::vector<std::int32_t> dist_matrix(static_cast<std::size_t>(n) * n);
    auto fill_row = [&](std::int32_t s) {
        std::vector<std::int32_t> dist, order;
        bfs_distance_sum(net, s, dist, order);
        std::copy(dist.begin(), dist.end(), dist_matrix.begin() + static_cast<std::size_t>(s) * n);
    };
    auto d = [&](std::int32_t a, std::int32_t b) {
        return dist_matrix[static_cast<std::size_t>(a) * n + b];
    };
    std::vector<double> values(n, 0.0);
    auto count_for = [&](std::int32_t i) {
        std::int64_t count = 0;
        for (std::int32_t p = 0; p < n; ++p) {
            if (p == i || d(p, i) == kUnreached) continue;
            for (std::int32_t q = p + 1; q < n; ++q) {
                if (q == i || d(p, q) == kUnreached) continue;
                if (d(p, i) + d(i, q) == d(p, q)) ++count;
            }
        }
        values[i] = static_cast<double>(count);
    };
    if (exec == Exec::par) {
#pragma omp parallel for schedule(static)
        for (std::int32_t s = 0; s < n; ++s) fill_row(s);
#pragma omp parallel for schedule(dynamic)
        for (std::int32_t i = 0; i < n; ++i) count_for(i);
    } else {
        for (std::int32_t s = 0; s < n; ++s) fill_row(s);
        for (std::int32_t i = 0; i < n; ++i) count_for(i);
    }
    return values;
}

} // namespace

CentralityScores closeness_centrality(const Network& net, Exec exec) {
    const std::int32_t n = net.node_count();
    CentralityScores scores;
    scores.measure = Measure::closeness;
    scores.values.assign(n, 0.0);

    if (!is_connected(net))
        throw std::runtime_error(
            "closeness centrality requires a connected graph; reduce to the giant component first");

    if (exec == Exec::par) {
#pragma omp parallel
        {
            std::vector<std::int32_t> dist, order;
#pragma omp for schedule(static)
            for (std::int32_t v = 0; v < n; ++v) {
                std::int64_t sum = bfs_distance_sum(net, v, dist, order);
                // l_v = sum / N, C_v = 1 / l_v; single node: l = 0/1, C defined as N
                scores.values[v] = sum == 0 ? static_cast<double>(n)
                                            : static_cast<double>(n) / static_cast<double>(sum);
            }
        }
    } else {
        std::vector<std::int32_t> dist, order;
        for (std::int32_t v = 0; v < n; ++v) {
            std::int64_t sum = bfs_distance_sum(net, v, dist, order);
            scores.values[v] = sum == 0 ? static_cast<double>(n)
                                        : static_cast<double>(n) / static_cast<double>(sum);
        }
    }
    return scores;
}

CentralityScores betweenness_centrality(const Network& net, BetweennessSemantics semantics,
                                        Exec exec) {
    CentralityScores scores;
    scores.measure = Measure::betweenness;
    if (semantics == BetweennessSemantics::fractional)
        scores.values = exec == Exec::par ? brandes_parallel(net) : brandes_serial(net);
    else
        scores.values = betweenness_indicator(net, exec);
    return scores;
}

CentralityScores pagerank_centrality(const Network& net, PagerankParams params, Exec exec) {
    const std::int32_t n = net.node_count();
    if (!(params.eta >= 0.0 && params.eta < 1.0))
        throw std::invalid_argument("pagerank: eta must lie in [0, 1)");
    if (params.delta <= 0.0) throw std::invalid_argument("pagerank: delta must be positive");
    if (params.eta > 0.0)
        for (std::int32_t v = 0; v < n; ++v)
            if (net.degree(v) == 0)
                throw std::runtime_error("pagerank: isolated node " + std::to_string(v) +
                                         " makes the update undefined; reduce to the giant component");

    std::vector<double> current(n, params.delta), next(n, 0.0);
    double residual = std::numeric_limits<double>::infinity();
    auto update_row = [&](std::int32_t i) {
        double acc = 0.0;
        for (std::int32_t j : net.neighbors(i)) acc += current[j] / net.degree(j);
        next[i] = params.eta * acc + params.delta;
    };
    for (int iter = 0; iter < params.max_iterations; ++iter) {
        if (exec == Exec::par && n > kParallelNodeThreshold) {
#pragma omp parallel for schedule(static, 64)
            for (std::int32_t i = 0; i < n; ++i) update_row(i);
        } else {
            for (std::int32_t i = 0; i < n; ++i) update_row(i);
        }
        residual = 0.0;
        for (std::int32_t i = 0; i < n; ++i)
            residual = std::max(residual, std::abs(next[i] - current[i]));
        if (residual <= params.tolerance) {
            // `current` satisfies the fixed-point equations within tolerance
            CentralityScores scores;
            scores.measure = Measure::pagerank;
            scores.values = std::move(current);
            scores.pagerank = params;
            return scores;
        }
        std::swap(current, next);
    }
    throw std::runtime_error("pagerank did not converge in " +
                             std::to_string(params.max_iterations) +
                             " iterations; max residual " + std::to_string(residual));
}

CentralityScores compute_centrality(const Network& net, Measure m, Exec exec) {
    switch (m) {
    case Measure::degree: return degree_centrality(net);
    case Measure::closeness: return closeness_centrality(net, exec);
    case Measure::betweenness: return betweenness_centrality(net, BetweennessSemantics::fractional, exec);
    case Measure::pagerank: return pagerank_centrality(net, {}, exec);
    }
    throw std::logic_error("unreachable");
}

Grouping::Grouping(std::vector<std::int32_t> group_of, std::int32_t group_count)
    : group_of_(std::move(group_of)) {
    if (group_count < 1) throw std::invalid_argument("grouping needs at least one group");
    sizes_.assign(group_count, 0);
    for (std::int32_t g : group_of_) {
        if (g < 0 || g >= group_count) throw std::invalid_argument("group index out of range");
        ++sizes_[g];
    }
    for (std::int32_t m = 0; m < group_count; ++m)
        if (sizes_[m] == 0)
            throw std::invalid_argument("group " + std::to_string(m) + " is empty");
}

Grouping Grouping::singletons(std::int32_t node_count) {
    std::vector<std::int32_t> ids(node_count);
    std::iota(ids.begin(), ids.end(), 0);
    return Grouping(std::move(ids), node_count);
}

Grouping Grouping::single_group(std::int32_t node_count) {
    return Grouping(std::vector<std::int32_t>(node_count, 0), 1);
}

Grouping group_by_centrality(const CentralityScores& scores, std::int32_t group_count,
                             std::uint64_t rng_seed) {
    const std::int32_t n = static_cast<std::int32_t>(scores.values.size());
    if (group_count < 1 || group_count > n)
        throw std::invalid_argument("group count must lie in [1, node_count]");

    std::vector<std::int32_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::int32_t a, std::int32_t b) {
        return scores.values[a] < scores.values[b];
    });

    // shuffle every maximal tied run so cut-straddling ties land uniformly
    SplitMix64 rng(rng_seed);
    std::size_t run_start = 0;
    for (std::size_t i = 1; i <= order.size(); ++i) {
        if (i == order.size() || scores.values[order[i]] != scores.values[order[run_start]]) {
            if (i - run_start > 1)
                fisher_yates(std::span<std::int32_t>(order.data() + run_start, i - run_start), rng);
            run_start = i;
        }
    }

    const std::int32_t base = n / group_count;
    const std::int32_t extra = n % group_count;
    std::vector<std::int32_t> group_of(n);
    std::size_t cursor = 0;
    for (std::int32_t m = 0; m < group_count; ++m) {
        std::int32_t size = base + (m < extra ? 1 : 0);
        for (std::int32_t i = 0; i < size; ++i) group_of[order[cursor++]] = m;
    }
    return Grouping(std::move(group_of), group_count);
}

} // namespace epictrl

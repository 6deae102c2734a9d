#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "epictrl/exec.hpp"
#include "epictrl/network.hpp"

namespace epictrl {

enum class Measure { degree, closeness, betweenness, pagerank };

Measure measure_from_string(const std::string& name);
std::string to_string(Measure m);

struct PagerankParams {
    double eta = 0.85;
    double delta = 1.0;
    double tolerance = 1e-12;
    int max_iterations = 10000;
};

struct CentralityScores {
    Measure measure = Measure::degree;
    std::vector<double> values;
    PagerankParams pagerank; // parameters actually used (pagerank only)
};

enum class BetweennessSemantics {
    fractional, // Brandes: pairs credit sigma_pq(i)/sigma_pq
    indicator,  // pair counted once if i lies on any geodesic between p and q
};

CentralityScores degree_centrality(const Network& net);

/// values[i] = N / sum_j d(i, j); requires a connected graph.
CentralityScores closeness_centrality(const Network& net, Exec exec = Exec::par);

/// Unordered pairs, endpoints excluded.
CentralityScores betweenness_centrality(const Network& net,
                                        BetweennessSemantics semantics =
                                            BetweennessSemantics::fractional,
                                        Exec exec = Exec::par);

/// Fixed point of P_i = eta * sum_j A_ij P_j / k_j + delta by repeated
/// substitution from P = delta; the returned vector satisfies the equations
/// with max residual <= tolerance. Rejects isolated nodes when eta > 0.
CentralityScores pagerank_centrality(const Network& net, PagerankParams params = {},
                                     Exec exec = Exec::par);

CentralityScores compute_centrality(const Network& net, Measure m, Exec exec = Exec::par);

/// Partition of the nodes into contiguous centrality-rank blocks.
/// Group 0 holds the lowest-ranked nodes, group M-1 the top ones.
class Grouping {
public:
    Grouping(std::vector<std::int32_t> group_of, std::int32_t group_count);

    /// One group per node (group m = node m).
    static Grouping singletons(std::int32_t node_count);
    /// Everyone in group 0.
    static Grouping single_group(std::int32_t node_count);

    std::int32_t group_count() const { return static_cast<std::int32_t>(sizes_.size()); }
    std::int32_t node_count() const { return static_cast<std::int32_t>(group_of_.size()); }
    std::int32_t group_of(std::int32_t node) const { return group_of_[node]; }
    std::int32_t size(std::int32_t group) const { return sizes_[group]; }
    /// p_m = |N_m| / N.
    double fraction(std::int32_t group) const {
        return static_cast<double>(sizes_[group]) / static_cast<double>(group_of_.size());
    }
    const std::vector<std::int32_t>& assignments() const { return group_of_; }

private:
    std::vector<std::int32_t> group_of_;
    std::vector<std::int32_t> sizes_;
};

/// Sorts nodes ascending by score and cuts into M near-equal blocks; when
/// M does not divide N the first N mod M groups take the extra node. Tied
/// scores straddling a cut are assigned by a seeded uniform shuffle.
Grouping group_by_centrality(const CentralityScores& scores, std::int32_t group_count,
                             std::uint64_t rng_seed);

} // namespace epictrl

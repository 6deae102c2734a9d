#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace epictrl {

class ParseError : public std::runtime_error {
public:
    ParseError(std::string message, std::size_t line)
        : std::runtime_error(std::move(message)), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Undirected simple graph in compressed sparse (neighbor-list) form.
/// Immutable after construction: symmetric, zero diagonal, neighbor lists
/// sorted ascending with no duplicates. Safe for concurrent reads.
class Network {
public:
    Network() = default;

    /// Builds from an edge list over node ids 0..node_count-1. Self-loops
    /// are dropped, parallel and reversed duplicates collapsed.
    static Network from_edges(std::int32_t node_count,
                              std::span<const std::pair<std::int32_t, std::int32_t>> edges);

    std::int32_t node_count() const { return static_cast<std::int32_t>(offsets_.size()) - 1; }
    std::int64_t edge_count() const { return static_cast<std::int64_t>(adjacency_.size()) / 2; }

    std::span<const std::int32_t> neighbors(std::int32_t v) const {
        return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
    }
    std::int32_t degree(std::int32_t v) const {
        return static_cast<std::int32_t>(offsets_[v + 1] - offsets_[v]);
    }

private:
    std::vector<std::int64_t> offsets_;   // size N+1
    std::vector<std::int32_t> adjacency_; // size 2E, sorted per row
};

struct LoadStats {
    std::size_t self_loops_dropped = 0;
    std::size_t duplicate_edges_dropped = 0;
    std::int32_t raw_id_count = 0;
    std::vector<std::int64_t> original_ids; // new id -> id in the input file
};

/// Reads a SNAP-style edge list ('#' comments, "u v" per line). Node ids are
/// relabeled to 0..N-1 in order of first appearance.
Network load_edge_list(std::istream& in, LoadStats* stats = nullptr);
Network load_edge_list_file(const std::string& path, LoadStats* stats = nullptr);

/// Writes the same format, one "u v" line per edge with u < v, ascending.
/// Isolated nodes are not representable in this format.
void save_edge_list(const Network& net, std::ostream& out);

struct ComponentResult {
    Network graph;
    /// old id -> new id, -1 for nodes outside the kept component.
    std::vector<std::int32_t> old_to_new;
};

/// Induced subgraph on the largest connected component; among equal-sized
/// components the one containing the smallest original id wins. Kept nodes
/// are relabeled contiguously in ascending original-id order.
ComponentResult giant_component(const Network& net);

/// Induced subgraph on the first `target` nodes reached by breadth-first
/// traversal from `start`, visiting each level in ascending id order.
/// Throws if target exceeds N or the reachable component is too small.
Network bfs_sample(const Network& net, std::int32_t start, std::int32_t target,
                   std::vector<std::int32_t>* old_to_new = nullptr);

bool is_connected(const Network& net);

/// Barabasi-Albert preferential attachment graph: seed clique of
/// (edges_per_node + 1) nodes, then each new node attaches to
/// edges_per_node distinct existing nodes chosen proportionally to degree.
Network generate_preferential_attachment(std::int32_t node_count, std::int32_t edges_per_node,
                                         std::uint64_t rng_seed);

/// Erdos-Renyi G(n, p); test helper.
Network generate_gnp(std::int32_t node_count, double edge_probability, std::uint64_t rng_seed);

} // namespace epictrl

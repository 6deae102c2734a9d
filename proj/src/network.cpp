#include "epictrl/network.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <queue>
#include <unordered_map>

#include "epictrl/rng.hpp"

namespace epictrl {

Network Network::from_edges(std::int32_t node_count,
                            std::span<const std::pair<std::int32_t, std::int32_t>> edges) {
    if (node_count < 1) throw std::invalid_argument("network needs at least one node");

    std::vector<std::pair<std::int32_t, std::int32_t>> normalized;
    normalized.reserve(edges.size());
    for (auto [u, v] : edges) {
        if (u < 0 || u >= node_count || v < 0 || v >= node_count)
            throw std::invalid_argument("edge endpoint out of range");
        if (u == v) continue;
        normalized.emplace_back(std::min(u, v), std::max(u, v));
    }
    std::sort(normalized.begin(), normalized.end());
    normalized.erase(std::unique(normalized.begin(), normalized.end()), normalized.end());

    Network net;
    net.offsets_.assign(static_cast<std::size_t>(node_count) + 1, 0);
    for (auto [u, v] : normalized) {
        ++net.offsets_[static_cast<std::size_t>(u) + 1];
        ++net.offsets_[static_cast<std::size_t>(v) + 1];
    }
    for (std::size_t i = 1; i < net.offsets_.size(); ++i) net.offsets_[i] += net.offsets_[i - 1];

    net.adjacency_.resize(static_cast<std::size_t>(net.offsets_.back()));
    std::vector<std::int64_t> cursor(net.offsets_.begin(), net.offsets_.end() - 1);
    for (auto [u, v] : normalized) {
        net.adjacency_[static_cast<std::size_t>(cursor[u]++)] = v;
        net.adjacency_[static_cast<std::size_t>(cursor[v]++)] = u;
    }
    // rows come out sorted because `normalized` is sorted lexicographically,
    // except the v-side entries; sort each row to be safe
    for (std::int32_t v = 0; v < node_count; ++v) {
        std::sort(net.adjacency_.begin() + net.offsets_[v],
                  net.adjacency_.begin() + net.offsets_[v + 1]);
    }
    return net;
}

namespace {

bool parse_id(std::string_view token, std::int64_t& out) {
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
    return ec == std::errc() && ptr == token.data() + token.size() && out >= 0;
}

} // namespace

Network load_edge_list(std::istream& in, LoadStats* stats) {
    std::unordered_map<std::int64_t, std::int32_t> relabel;
    std::vector<std::pair<std::int32_t, std::int32_t>> edges;
    LoadStats local;

    auto id_of = [&](std::int64_t raw) {
        auto [it, inserted] = relabel.emplace(raw, static_cast<std::int32_t>(relabel.size()));
        (void)inserted;
        return it->second;
    };

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t begin = line.find_first_not_of(" \t\r");
        if (begin == std::string::npos) continue; // blank line
        if (line[begin] == '#') continue;

        std::string_view rest(line);
        std::int64_t raw[2];
        int tokens = 0;
        bool ok = true;
        while (true) {
            std::size_t from = rest.find_first_not_of(" \t\r");
            if (from == std::string_view::npos) break;
            std::size_t to = rest.find_first_of(" \t\r", from);
            std::string_view token = rest.substr(from, to - from);
            rest = (to == std::string_view::npos) ? std::string_view{} : rest.substr(to);
            if (tokens >= 2 || !parse_id(token, raw[tokens])) {
                ok = false;
                break;
            }
            ++tokens;
        }
        if (!ok || tokens != 2)
            throw ParseError("malformed edge at line " + std::to_string(line_no) +
                                 ": expected two nonnegative integers",
                             line_no);

        std::int32_t u = id_of(raw[0]);
        std::int32_t v = id_of(raw[1]);
        if (u == v) {
            ++local.self_loops_dropped;
            continue;
        }
        edges.emplace_back(u, v);
    }

    if (relabel.empty()) throw ParseError("empty edge list", line_no);
    local.raw_id_count = static_cast<std::int32_t>(relabel.size());
    local.original_ids.resize(relabel.size());
    for (const auto& [raw, id] : relabel) local.original_ids[id] = raw;

    std::size_t before = edges.size();
    Network net = Network::from_edges(local.raw_id_count, edges);
    local.duplicate_edges_dropped = before - static_cast<std::size_t>(net.edge_count());
    if (stats) *stats = local;
    return net;
}

Network load_edge_list_file(const std::string& path, LoadStats* stats) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open graph file: " + path);
    return load_edge_list(in, stats);
}

void save_edge_list(const Network& net, std::ostream& out) {
    out << "# undirected edge list, " << net.node_count() << " nodes, " << net.edge_count()
        << " edges\n";
    for (std::int32_t u = 0; u < net.node_count(); ++u)
        for (std::int32_t v : net.neighbors(u))
            if (u < v) out << u << ' ' << v << '\n';
}

ComponentResult giant_component(const Network& net) {
    const std::int32_t n = net.node_count();
    std::vector<std::int32_t> component(n, -1);
    std::int32_t best_root = -1;
    std::int64_t best_size = -1;

    std::vector<std::int32_t> queue;
    for (std::int32_t root = 0; root < n; ++root) {
        if (component[root] >= 0) continue;
        queue.assign(1, root);
        component[root] = root;
        std::size_t head = 0;
        while (head < queue.size()) {
            std::int32_t v = queue[head++];
            for (std::int32_t w : net.neighbors(v)) {
                if (component[w] < 0) {
                    component[w] = root;
                    queue.push_back(w);
                }
            }
        }
        // first root met among equal sizes contains the smallest id
        if (static_cast<std::int64_t>(queue.size()) > best_size) {
            best_size = static_cast<std::int64_t>(queue.size());
            best_root = root;
        }
    }

    ComponentResult result;
    result.old_to_new.assign(n, -1);
    std::int32_t next_id = 0;
    for (std::int32_t v = 0; v < n; ++v)
        if (component[v] == best_root) result.old_to_new[v] = next_id++;

    std::vector<std::pair<std::int32_t, std::int32_t>> edges;
    for (std::int32_t u = 0; u < n; ++u) {
        if (result.old_to_new[u] < 0) continue;
        for (std::int32_t v : net.neighbors(u))
            if (u < v) edges.emplace_back(result.old_to_new[u], result.old_to_new[v]);
    }
    result.graph = Network::from_edges(next_id, edges);
    return result;
}

Network bfs_sample(const Network& net, std::int32_t start, std::int32_t target,
                   std::vector<std::int32_t>* old_to_new) {
    const std::int32_t n = net.node_count();
    if (start < 0 || start >= n) throw std::invalid_argument("bfs_sample: start node out of range");
    if (target < 1 || target > n)
        throw std::invalid_argument("bfs_sample: target must be in [1, node_count]");

    std::vector<char> visited(n, 0);
    std::vector<std::int32_t> taken;
    taken.reserve(target);

    std::vector<std::int32_t> level{start};
    visited[start] = 1;
    while (!level.empty() && static_cast<std::int32_t>(taken.size()) < target) {
        // levels are visited in ascending node id order
        std::sort(level.begin(), level.end());
        for (std::int32_t v : level) {
            taken.push_back(v);
            if (static_cast<std::int32_t>(taken.size()) == target) break;
        }
        std::vector<std::int32_t> next;
        for (std::int32_t v : level)
            for (std::int32_t w : net.neighbors(v))
                if (!visited[w]) {
                    visited[w] = 1;
                    next.push_back(w);
                }
        level = std::move(next);
    }
    if (static_cast<std::int32_t>(taken.size()) < target)
        throw std::runtime_error("bfs_sample: component reachable from start has only " +
                                 std::to_string(taken.size()) + " nodes, need " +
                                 std::to_string(target));

    std::sort(taken.begin(), taken.end());
    std::vector<std::int32_t> map(n, -1);
    for (std::size_t i = 0; i < taken.size(); ++i) map[taken[i]] = static_cast<std::int32_t>(i);

    std::vector<std::pair<std::int32_t, std::int32_t>> edges;
    for (std::int32_t u : taken)
        for (std::int32_t v : net.neighbors(u))
            if (u < v && map[v] >= 0) edges.emplace_back(map[u], map[v]);

    if (old_to_new) *old_to_new = std::move(map);
    return Network::from_edges(target, edges);
}

bool is_connected(const Network& net) {
    const std::int32_t n = net.node_count();
    if (n == 0) return false;
    std::vector<char> visited(n, 0);
    std::vector<std::int32_t> queue{0};
    visited[0] = 1;
    std::size_t head = 0;
    std::int32_t seen = 1;
    while (head < queue.size()) {
        std::int32_t v = queue[head++];
        for (std::int32_t w : net.neighbors(v))
            if (!visited[w]) {
                visited[w] = 1;
                ++seen;
                queue.push_back(w);
            }
    }
    return seen == n;
}

Network generate_preferential_attachment(std::int32_t node_count, std::int32_t edges_per_node,
                                         std::uint64_t rng_seed) {
    if (edges_per_node < 1) throw std::invalid_argument("edges_per_node must be positive");
    const std::int32_t seed_nodes = edges_per_node + 1;
    if (node_count < seed_nodes)
        throw std::invalid_argument("node_count too small for the seed clique");

    SplitMix64 rng(rng_seed);
    std::vector<std::pair<std::int32_t, std::int32_t>> edges;
    // endpoint list doubles as the degree-proportional sampling urn
    std::vector<std::int32_t> urn;
    for (std::int32_t u = 0; u < seed_nodes; ++u)
        for (std::int32_t v = u + 1; v < seed_nodes; ++v) {
            edges.emplace_back(u, v);
            urn.push_back(u);
            urn.push_back(v);
        }

    std::vector<std::int32_t> targets;
    for (std::int32_t v = seed_nodes; v < node_count; ++v) {
        targets.clear();
        while (static_cast<std::int32_t>(targets.size()) < edges_per_node) {
            std::int32_t t = urn[rng.uniform_below(urn.size())];
            if (std::find(targets.begin(), targets.end(), t) == targets.end())
                targets.push_back(t);
        }
        for (std::int32_t t : targets) {
            edges.emplace_back(t, v);
            urn.push_back(t);
            urn.push_back(v);
        }
    }
    return Network::from_edges(node_count, edges);
}

Network generate_gnp(std::int32_t node_count, double edge_probability, std::uint64_t rng_seed) {
    SplitMix64 rng(rng_seed);
    std::vector<std::pair<std::int32_t, std::int32_t>> edges;
    for (std::int32_t u = 0; u < node_count; ++u)
        for (std::int32_t v = u + 1; v < node_count; ++v)
            if (rng.uniform01() < edge_probability) edges.emplace_back(u, v);
    return Network::from_edges(node_count, edges);
}

} // namespace epictrl

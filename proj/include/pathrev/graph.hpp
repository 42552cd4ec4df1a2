#pragma once

#include "pathrev/tree_core.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pathrev {

/// Undirected simple graph with all-pairs hop distances.
class Graph {
public:
    static constexpr std::uint32_t kUnreachable = std::numeric_limits<std::uint32_t>::max();

    Graph() = default;

    Graph(std::size_t n, const std::vector<std::pair<NodeId, NodeId>>& edges) : adj_(n)
    {
        std::set<std::pair<NodeId, NodeId>> seen;
        for (auto [u, v] : edges) {
            if (u >= n || v >= n) {
                throw std::invalid_argument("Graph: edge endpoint out of range");
            }
            if (u == v) {
                throw std::invalid_argument("Graph: self-loop");
            }
            if (!seen.insert(std::minmax(u, v)).second) {
                continue;
            }
            adj_[u].push_back(v);
            adj_[v].push_back(u);
        }
        for (auto& a : adj_) {
            std::sort(a.begin(), a.end());
        }
        edge_count_ = seen.size();
        compute_distances();
    }

    [[nodiscard]] std::size_t size() const noexcept { return adj_.size(); }
    [[nodiscard]] std::size_t edge_count() const noexcept { return edge_count_; }
    [[nodiscard]] const std::vector<NodeId>& neighbors(NodeId v) const { return adj_.at(v); }

    [[nodiscard]] std::uint32_t distance(NodeId u, NodeId v) const { return dist_.at(u * adj_.size() + v); }

    [[nodiscard]] bool connected() const noexcept
    {
        return std::none_of(dist_.begin(), dist_.end(), [](auto d) { return d == kUnreachable; });
    }

    /// Largest finite distance; meaningful when connected().
    [[nodiscard]] std::uint32_t diameter() const noexcept { return diameter_; }

    /// Shortest path u .. v inclusive, ties broken toward the smaller neighbor id.
    [[nodiscard]] std::vector<NodeId> shortest_path(NodeId u, NodeId v) const
    {
        if (distance(u, v) == kUnreachable) {
            throw std::invalid_argument("Graph::shortest_path: unreachable");
        }
        std::vector<NodeId> path{u};
        for (NodeId cur = u; cur != v;) {
            for (NodeId w : adj_[cur]) {
                if (distance(w, v) + 1 == distance(cur, v)) {
                    cur = w;
                    break;
                }
            }
            path.push_back(cur);
        }
        return path;
    }

private:
    void compute_distances()
    {
        const std::size_t n = adj_.size();
        dist_.assign(n * n, kUnreachable);
        diameter_ = 0;
        std::queue<NodeId> q;
        for (NodeId s = 0; s < n; ++s) {
            auto* row = &dist_[s * n];
            row[s] = 0;
            q.push(s);
            while (!q.empty()) {
                const NodeId u = q.front();
                q.pop();
                for (NodeId w : adj_[u]) {
                    if (row[w] == kUnreachable) {
                        row[w] = row[u] + 1;
                        diameter_ = std::max(diameter_, row[w]);
                        q.push(w);
                    }
                }
            }
        }
    }

    std::vector<std::vector<NodeId>> adj_;
    std::vector<std::uint32_t> dist_;
    std::size_t edge_count_ = 0;
    std::uint32_t diameter_ = 0;
};

inline Graph complete_graph(std::size_t n)
{
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (NodeId u = 0; u < n; ++u) {
        for (NodeId v = u + 1; v < n; ++v) {
            edges.emplace_back(u, v);
        }
    }
    return Graph(n, edges);
}

struct TopologySpec {
    enum class Kind { kComplete, kSparse, kRegular };
    Kind kind = Kind::kComplete;
    std::size_t n = 1;
    std::size_t edges = 0;  // kSparse: M
    std::size_t degree = 0; // kRegular: r

    static TopologySpec complete(std::size_t n) { return {Kind::kComplete, n, 0, 0}; }
    static TopologySpec sparse(std::size_t n, std::size_t m) { return {Kind::kSparse, n, m, 0}; }
    static TopologySpec regular(std::size_t n, std::size_t r) { return {Kind::kRegular, n, 0, r}; }
};

class TopologyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

/// Uniform G(n, M): M distinct edges drawn without replacement.
inline Graph sample_sparse(std::size_t n, std::size_t m, std::mt19937_64& rng)
{
    std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(n - 1));
    std::set<std::pair<NodeId, NodeId>> edges;
    while (edges.size() < m) {
        const NodeId u = pick(rng), v = pick(rng);
        if (u != v) {
            edges.insert(std::minmax(u, v));
        }
    }
    return Graph(n, {edges.begin(), edges.end()});
}

/// Pairing (configuration) model; nullopt on a loop or multi-edge.
inline std::optional<Graph> sample_regular(std::size_t n, std::size_t r, std::mt19937_64& rng)
{
    std::vector<NodeId> points;
    points.reserve(n * r);
    for (NodeId v = 0; v < n; ++v) {
        points.insert(points.end(), r, v);
    }
    std::shuffle(points.begin(), points.end(), rng);
    std::set<std::pair<NodeId, NodeId>> edges;
    for (std::size_t i = 0; i + 1 < points.size(); i += 2) {
        const NodeId u = points[i], v = points[i + 1];
        if (u == v || !edges.insert(std::minmax(u, v)).second) {
            return std::nullopt;
        }
    }
    return Graph(n, {edges.begin(), edges.end()});
}

} // namespace detail

/// Draws a connected graph of the requested kind, resampling up to
/// `max_retries` times. Throws TopologyError when parameters cannot admit a
/// connected graph or retries run out.
inline Graph generate_topology(const TopologySpec& spec, std::uint64_t seed, std::size_t max_retries = 1000)
{
    using Kind = TopologySpec::Kind;
    const std::size_t n = spec.n;
    if (n == 0) {
        throw TopologyError("generate_topology: n must be positive");
    }
    if (spec.kind == Kind::kComplete) {
        return complete_graph(n);
    }
    const std::size_t max_edges = n * (n - 1) / 2;
    if (spec.kind == Kind::kSparse && (spec.edges + 1 < n || spec.edges > max_edges)) {
        throw TopologyError("generate_topology: sparse(" + std::to_string(n) + ", " + std::to_string(spec.edges) +
                            ") cannot be connected and simple");
    }
    if (spec.kind == Kind::kRegular &&
        (spec.degree >= n || (n * spec.degree) % 2 != 0 || (n > 2 && spec.degree < 2) || (n == 2 && spec.degree != 1))) {
        throw TopologyError("generate_topology: no connected " + std::to_string(spec.degree) + "-regular graph on " +
                            std::to_string(n) + " nodes");
    }
    std::mt19937_64 rng(seed);
    for (std::size_t attempt = 0; attempt < max_retries; ++attempt) {
        std::optional<Graph> g;
        if (spec.kind == Kind::kSparse) {
            g = detail::sample_sparse(n, spec.edges, rng);
        } else {
            g = detail::sample_regular(n, spec.degree, rng);
        }
        if (g && g->connected()) {
            return std::move(*g);
        }
    }
    throw TopologyError("generate_topology: no connected sample after " + std::to_string(max_retries) + " retries");
}

} // namespace pathrev

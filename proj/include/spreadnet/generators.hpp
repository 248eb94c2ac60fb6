#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "spreadnet/graph.hpp"
#include "spreadnet/rng.hpp"

namespace spreadnet {

// Synthetic undirected, unweighted layers. All generators are pure functions
// of (parameters, n, seed) and emit the symmetric closure (both arcs, weight 1).

namespace detail {

inline LayerGraph close_symmetric(NodeId n, const std::vector<std::pair<NodeId, NodeId>>& edges) {
    std::vector<Arc> arcs;
    arcs.reserve(edges.size() * 2);
    for (auto [i, j] : edges) {
        arcs.push_back({i, j, 1.0});
        arcs.push_back({j, i, 1.0});
    }
    return LayerGraph::from_arcs(n, std::move(arcs));
}

}  // namespace detail

// G(n, p) via geometric skips over the i<j pairs, O(edges) expected.
inline LayerGraph generate_erdos_renyi(NodeId n, double p, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("erdos_renyi: n must be >= 1");
    if (!(p >= 0.0) || p > 1.0) throw std::invalid_argument("erdos_renyi: p must be in [0,1]");
    std::vector<std::pair<NodeId, NodeId>> edges;
    if (p > 0.0) {
        Rng rng(seed);
        const double logq = (p < 1.0) ? std::log1p(-p) : 0.0;
        NodeId i = 1;
        long long j = -1;
        while (i < n) {
            if (p < 1.0) {
                const double u = rng.uniform_open();
                j += 1 + static_cast<long long>(std::floor(std::log(u) / logq));
            } else {
                j += 1;
            }
            while (j >= static_cast<long long>(i) && i < n) {
                j -= i;
                ++i;
            }
            if (i < n) edges.emplace_back(static_cast<NodeId>(j), i);
        }
    }
    return detail::close_symmetric(n, edges);
}

// Uniform points in the unit square, edge when distance <= radius.
// Grid bucketing keeps this near O(n + edges).
inline LayerGraph generate_geometric(NodeId n, double radius, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("geometric: n must be >= 1");
    if (!(radius > 0.0)) throw std::invalid_argument("geometric: radius must be positive");
    Rng rng(seed);
    std::vector<double> x(n), y(n);
    for (NodeId i = 0; i < n; ++i) {
        x[i] = rng.uniform();
        y[i] = rng.uniform();
    }
    const double r2 = radius * radius;
    const int cells = std::max(1, static_cast<int>(std::floor(1.0 / radius)));
    const double cell = 1.0 / cells;
    std::vector<std::vector<NodeId>> bucket(static_cast<std::size_t>(cells) * cells);
    auto cell_of = [&](double v) {
        int c = static_cast<int>(v / cell);
        return std::min(c, cells - 1);
    };
    for (NodeId i = 0; i < n; ++i)
        bucket[static_cast<std::size_t>(cell_of(y[i])) * cells + cell_of(x[i])].push_back(i);
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (NodeId i = 0; i < n; ++i) {
        const int cx = cell_of(x[i]), cy = cell_of(y[i]);
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                const int bx = cx + dx, by = cy + dy;
                if (bx < 0 || by < 0 || bx >= cells || by >= cells) continue;
                for (NodeId j : bucket[static_cast<std::size_t>(by) * cells + bx]) {
                    if (j <= i) continue;
                    const double ddx = x[i] - x[j], ddy = y[i] - y[j];
                    if (ddx * ddx + ddy * ddy <= r2) edges.emplace_back(i, j);
                }
            }
    }
    return detail::close_symmetric(n, edges);
}

// Radius giving expected mean degree k on the unit square (boundary ignored).
inline double geometric_radius_for_degree(NodeId n, double k) {
    if (n < 2) throw std::invalid_argument("geometric_radius_for_degree: n must be >= 2");
    if (!(k > 0.0)) throw std::invalid_argument("geometric_radius_for_degree: degree must be positive");
    return std::sqrt(k / (std::numbers::pi * static_cast<double>(n - 1)));
}

// Preferential attachment, m edges per incoming node; seeded with an
// m+1 clique.
inline LayerGraph generate_barabasi_albert(NodeId n, NodeId m, std::uint64_t seed) {
    if (m < 1) throw std::invalid_argument("barabasi_albert: m must be >= 1");
    if (n < m + 1) throw std::invalid_argument("barabasi_albert: n must be > m");
    Rng rng(seed);
    std::vector<std::pair<NodeId, NodeId>> edges;
    std::vector<NodeId> endpoints;  // each node appears once per incident edge
    for (NodeId i = 0; i < m + 1; ++i)
        for (NodeId j = i + 1; j < m + 1; ++j) {
            edges.emplace_back(i, j);
            endpoints.push_back(i);
            endpoints.push_back(j);
        }
    std::vector<NodeId> chosen;
    for (NodeId v = m + 1; v < n; ++v) {
        chosen.clear();
        while (chosen.size() < m) {
            const NodeId t = endpoints[rng.uniform_index(endpoints.size())];
            bool dup = false;
            for (NodeId c : chosen) dup |= (c == t);
            if (!dup) chosen.push_back(t);
        }
        for (NodeId t : chosen) {
            edges.emplace_back(t, v);
            endpoints.push_back(t);
            endpoints.push_back(v);
        }
    }
    return detail::close_symmetric(n, edges);
}

// Ring lattice with k nearest neighbors (k even), each edge rewired with
// probability p_rewire.
inline LayerGraph generate_watts_strogatz(NodeId n, NodeId k, double p_rewire,
                                          std::uint64_t seed) {
    if (k < 2 || k % 2 != 0) throw std::invalid_argument("watts_strogatz: k must be even and >= 2");
    if (n <= k) throw std::invalid_argument("watts_strogatz: n must exceed k");
    if (!(p_rewire >= 0.0) || p_rewire > 1.0)
        throw std::invalid_argument("watts_strogatz: p_rewire must be in [0,1]");
    Rng rng(seed);
    std::vector<std::vector<NodeId>> adj(n);
    auto has_edge = [&](NodeId a, NodeId b) {
        for (NodeId v : adj[a])
            if (v == b) return true;
        return false;
    };
    auto add_edge = [&](NodeId a, NodeId b) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    };
    for (NodeId i = 0; i < n; ++i)
        for (NodeId d = 1; d <= k / 2; ++d) add_edge(i, (i + d) % n);
    for (NodeId i = 0; i < n; ++i)
        for (NodeId d = 1; d <= k / 2; ++d) {
            if (rng.uniform() >= p_rewire) continue;
            const NodeId old = (i + d) % n;
            if (adj[i].size() >= n - 1) continue;  // saturated, nothing to rewire to
            NodeId cand;
            do {
                cand = static_cast<NodeId>(rng.uniform_index(n));
            } while (cand == i || has_edge(i, cand));
            auto drop = [&](NodeId a, NodeId b) {
                for (auto& v : adj[a])
                    if (v == b) {
                        v = adj[a].back();
                        adj[a].pop_back();
                        return;
                    }
            };
            drop(i, old);
            drop(old, i);
            add_edge(i, cand);
        }
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (NodeId i = 0; i < n; ++i)
        for (NodeId j : adj[i])
            if (i < j) edges.emplace_back(i, j);
    return detail::close_symmetric(n, edges);
}

inline LayerGraph generate_complete(NodeId n) {
    if (n < 1) throw std::invalid_argument("complete: n must be >= 1");
    std::vector<std::pair<NodeId, NodeId>> edges;
    edges.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (NodeId i = 0; i < n; ++i)
        for (NodeId j = i + 1; j < n; ++j) edges.emplace_back(i, j);
    return detail::close_symmetric(n, edges);
}

}  // namespace spreadnet

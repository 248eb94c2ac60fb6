#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace spreadnet {

using NodeId = std::uint32_t;

struct Arc {
    NodeId src;
    NodeId dst;
    double weight;
};

// One contact layer stored in both row-compressed (out-edges) and
// column-compressed (in-edges) form, so both "who do I influence" and
// "who influences me" are O(degree) lookups.
class LayerGraph {
public:
    LayerGraph() = default;

    // Builds from an arbitrary arc list. Duplicate arcs merge by summing
    // weights; self-loops and non-positive or non-finite weights are rejected.
    static LayerGraph from_arcs(NodeId node_count, std::vector<Arc> arcs) {
        for (const Arc& a : arcs) {
            if (a.src >= node_count || a.dst >= node_count)
                throw std::invalid_argument("arc endpoint out of range");
            if (a.src == a.dst)
                throw std::invalid_argument("self-loop " + std::to_string(a.src) + "->" +
                                            std::to_string(a.dst) + " is not allowed");
            if (!(a.weight > 0.0) || !std::isfinite(a.weight))
                throw std::invalid_argument("edge weight must be positive and finite");
        }
        std::sort(arcs.begin(), arcs.end(), [](const Arc& x, const Arc& y) {
            return x.src != y.src ? x.src < y.src : x.dst < y.dst;
        });
        // merge duplicates by weight summation
        std::vector<Arc> merged;
        merged.reserve(arcs.size());
        for (const Arc& a : arcs) {
            if (!merged.empty() && merged.back().src == a.src && merged.back().dst == a.dst)
                merged.back().weight += a.weight;
            else
                merged.push_back(a);
        }

        LayerGraph g;
        g.node_count_ = node_count;
        g.out_offsets_.assign(node_count + 1, 0);
        g.out_ids_.reserve(merged.size());
        g.out_weights_.reserve(merged.size());
        for (const Arc& a : merged) g.out_offsets_[a.src + 1]++;
        for (NodeId i = 0; i < node_count; ++i) g.out_offsets_[i + 1] += g.out_offsets_[i];
        for (const Arc& a : merged) {
            g.out_ids_.push_back(a.dst);
            g.out_weights_.push_back(a.weight);
        }
        g.build_in_index();
        return g;
    }

    NodeId node_count() const { return node_count_; }
    std::size_t arc_count() const { return out_ids_.size(); }

    struct Neighbor {
        NodeId id;
        double weight;
    };

    class NeighborRange {
    public:
        NeighborRange(const NodeId* ids, const double* weights, std::size_t n)
            : ids_(ids), weights_(weights), n_(n) {}
        std::size_t size() const { return n_; }
        bool empty() const { return n_ == 0; }
        Neighbor operator[](std::size_t k) const { return {ids_[k], weights_[k]}; }

        class Iterator {
        public:
            Iterator(const NodeId* ids, const double* weights) : ids_(ids), weights_(weights) {}
            Neighbor operator*() const { return {*ids_, *weights_}; }
            Iterator& operator++() { ++ids_; ++weights_; return *this; }
            bool operator!=(const Iterator& o) const { return ids_ != o.ids_; }

        private:
            const NodeId* ids_;
            const double* weights_;
        };
        Iterator begin() const { return {ids_, weights_}; }
        Iterator end() const { return {ids_ + n_, weights_ + n_}; }

    private:
        const NodeId* ids_;
        const double* weights_;
        std::size_t n_;
    };

    // Arcs node -> j, increasing j: the nodes this node can influence.
    NeighborRange out_neighbors(NodeId node) const {
        check_node(node);
        const std::size_t lo = out_offsets_[node], hi = out_offsets_[node + 1];
        return {out_ids_.data() + lo, out_weights_.data() + lo, hi - lo};
    }

    // Arcs j -> node, increasing j: the potential inducers of this node.
    NeighborRange in_weights(NodeId node) const {
        check_node(node);
        const std::size_t lo = in_offsets_[node], hi = in_offsets_[node + 1];
        return {in_ids_.data() + lo, in_weights_.data() + lo, hi - lo};
    }

    std::size_t out_degree(NodeId node) const {
        check_node(node);
        return out_offsets_[node + 1] - out_offsets_[node];
    }

    std::size_t max_degree() const {
        std::size_t d = 0;
        for (NodeId i = 0; i < node_count_; ++i) {
            d = std::max(d, out_offsets_[i + 1] - out_offsets_[i]);
            d = std::max(d, in_offsets_[i + 1] - in_offsets_[i]);
        }
        return d;
    }

    std::vector<Arc> to_arcs() const {
        std::vector<Arc> arcs;
        arcs.reserve(arc_count());
        for (NodeId i = 0; i < node_count_; ++i)
            for (auto [j, w] : out_neighbors(i)) arcs.push_back({i, j, w});
        return arcs;
    }

    // raw CSR/CSC access, used by round-trip tests
    std::span<const std::size_t> out_offsets() const { return out_offsets_; }
    std::span<const NodeId> out_ids() const { return out_ids_; }
    std::span<const double> out_weight_array() const { return out_weights_; }
    std::span<const std::size_t> in_offsets() const { return in_offsets_; }
    std::span<const NodeId> in_ids() const { return in_ids_; }
    std::span<const double> in_weight_array() const { return in_weights_; }

private:
    void check_node(NodeId node) const {
        if (node >= node_count_)
            throw std::out_of_range("node " + std::to_string(node) + " out of range");
    }

    void build_in_index() {
        in_offsets_.assign(node_count_ + 1, 0);
        in_ids_.resize(out_ids_.size());
        in_weights_.resize(out_ids_.size());
        for (NodeId j : out_ids_) in_offsets_[j + 1]++;
        for (NodeId i = 0; i < node_count_; ++i) in_offsets_[i + 1] += in_offsets_[i];
        std::vector<std::size_t> cursor(in_offsets_.begin(), in_offsets_.end() - 1);
        // row-major traversal keeps each in-list sorted by source id
        for (NodeId i = 0; i < node_count_; ++i) {
            for (std::size_t k = out_offsets_[i]; k < out_offsets_[i + 1]; ++k) {
                const NodeId j = out_ids_[k];
                in_ids_[cursor[j]] = i;
                in_weights_[cursor[j]] = out_weights_[k];
                ++cursor[j];
            }
        }
    }

    NodeId node_count_ = 0;
    std::vector<std::size_t> out_offsets_;
    std::vector<NodeId> out_ids_;
    std::vector<double> out_weights_;
    std::vector<std::size_t> in_offsets_;
    std::vector<NodeId> in_ids_;
    std::vector<double> in_weights_;
};

// Shared node set, L independent edge sets.
class MultilayerNetwork {
public:
    explicit MultilayerNetwork(std::vector<LayerGraph> layers) : layers_(std::move(layers)) {
        if (layers_.empty()) throw std::invalid_argument("network needs at least one layer");
        node_count_ = layers_.front().node_count();
        for (const auto& l : layers_)
            if (l.node_count() != node_count_)
                throw std::invalid_argument("all layers must share the node count");
        max_degree_ = 0;
        for (const auto& l : layers_) max_degree_ = std::max(max_degree_, l.max_degree());
    }

    NodeId node_count() const { return node_count_; }
    std::size_t layer_count() const { return layers_.size(); }
    const LayerGraph& layer(std::size_t l) const { return layers_.at(l); }
    std::size_t max_degree() const { return max_degree_; }

    double mean_degree() const {
        double sum = 0.0;
        for (const auto& l : layers_)
            sum += static_cast<double>(l.arc_count()) / static_cast<double>(node_count_);
        return sum / static_cast<double>(layers_.size());
    }

private:
    std::vector<LayerGraph> layers_;
    NodeId node_count_ = 0;
    std::size_t max_degree_ = 0;
};

namespace detail {

inline bool blank_or_comment(const std::string& line) {
    for (char c : line) {
        if (c == '#') return true;
        if (!std::isspace(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

}  // namespace detail

// Parses "src dst [weight]" lines. Undirected input materializes both arc
// directions; duplicates merge by summing weights.
inline LayerGraph load_edge_list(std::istream& in, bool directed, double default_weight = 1.0) {
    if (!(default_weight > 0.0) || !std::isfinite(default_weight))
        throw std::invalid_argument("default weight must be positive and finite");
    std::vector<Arc> arcs;
    NodeId max_id = 0;
    bool any = false;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (detail::blank_or_comment(line)) continue;
        std::istringstream ls(line);
        long long src, dst;
        if (!(ls >> src >> dst) || src < 0 || dst < 0)
            throw std::runtime_error("edge list line " + std::to_string(line_no) +
                                     ": expected \"src dst [weight]\"");
        double w = default_weight;
        if (ls >> w) {
            if (!(w > 0.0) || !std::isfinite(w))
                throw std::runtime_error("edge list line " + std::to_string(line_no) +
                                         ": weight must be positive and finite");
        } else if (!ls.eof()) {
            throw std::runtime_error("edge list line " + std::to_string(line_no) +
                                     ": malformed weight field");
        }
        std::string trailing;
        ls.clear();
        if (ls >> trailing)
            throw std::runtime_error("edge list line " + std::to_string(line_no) +
                                     ": trailing tokens");
        if (src == dst)
            throw std::runtime_error("edge list line " + std::to_string(line_no) +
                                     ": self-loop is not allowed");
        const auto s = static_cast<NodeId>(src), d = static_cast<NodeId>(dst);
        arcs.push_back({s, d, w});
        if (!directed) arcs.push_back({d, s, w});
        max_id = std::max({max_id, s, d});
        any = true;
    }
    const NodeId n = any ? max_id + 1 : 0;
    return LayerGraph::from_arcs(n, std::move(arcs));
}

inline LayerGraph load_edge_list(const std::string& path, bool directed,
                                 double default_weight = 1.0) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open edge list: " + path);
    try {
        return load_edge_list(in, directed, default_weight);
    } catch (const std::runtime_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

// One undirected edge per line; each arc pair (i<j) written once.
inline void write_edge_list(std::ostream& out, const LayerGraph& g, bool as_undirected = true) {
    for (NodeId i = 0; i < g.node_count(); ++i)
        for (auto [j, w] : g.out_neighbors(i)) {
            if (as_undirected && j < i) continue;
            out << i << ' ' << j;
            if (w != 1.0) out << ' ' << w;
            out << '\n';
        }
}

}  // namespace spreadnet

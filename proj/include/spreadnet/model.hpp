#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "spreadnet/graph.hpp"

namespace spreadnet {

using StateId = std::uint8_t;

// Dense M x M rate matrix, row = current state, column = destination.
class RateMatrix {
public:
    RateMatrix() = default;
    explicit RateMatrix(std::size_t m) : m_(m), data_(m * m, 0.0) {}

    std::size_t dim() const { return m_; }
    double operator()(std::size_t from, std::size_t to) const { return data_[from * m_ + to]; }
    double& operator()(std::size_t from, std::size_t to) { return data_[from * m_ + to]; }

    double row_sum(std::size_t from) const {
        double s = 0.0;
        for (std::size_t t = 0; t < m_; ++t) s += data_[from * m_ + t];
        return s;
    }

private:
    std::size_t m_ = 0;
    std::vector<double> data_;
};

// Edge-based mechanism of one layer: neighbors in the inducer state push a
// node along A_beta at a rate proportional to the in-edge weight.
struct EdgeMechanism {
    std::string layer_name;
    StateId inducer = 0;
    RateMatrix rates;  // per unit edge weight
};

struct ModelSchema {
    std::vector<std::string> state_names;
    RateMatrix node_rates;  // spontaneous transitions, neighbor-independent
    std::vector<EdgeMechanism> layers;

    std::size_t state_count() const { return state_names.size(); }

    int state_index(const std::string& name) const {
        for (std::size_t i = 0; i < state_names.size(); ++i)
            if (state_names[i] == name) return static_cast<int>(i);
        return -1;
    }
};

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }

    std::string to_string() const {
        std::string s;
        for (const auto& v : violations) s += v + "\n";
        return s;
    }
};

inline void check_rate_matrix(const RateMatrix& m, std::size_t states, const std::string& what,
                              ValidationReport& report) {
    if (m.dim() != states) {
        report.violations.push_back(what + ": dimension " + std::to_string(m.dim()) +
                                    " does not match state count " + std::to_string(states));
        return;
    }
    for (std::size_t i = 0; i < states; ++i)
        for (std::size_t j = 0; j < states; ++j) {
            const double r = m(i, j);
            if (!std::isfinite(r) || r < 0.0)
                report.violations.push_back(what + ": rate [" + std::to_string(i) + "," +
                                            std::to_string(j) + "] must be finite and >= 0");
            else if (i == j && r != 0.0)
                report.violations.push_back(what + ": nonzero diagonal at state " +
                                            std::to_string(i));
        }
}

inline ValidationReport validate(const ModelSchema& schema) {
    ValidationReport report;
    const std::size_t m = schema.state_count();
    if (m < 2) report.violations.push_back("model needs at least 2 states");
    std::set<std::string> seen;
    for (const auto& name : schema.state_names)
        if (!seen.insert(name).second)
            report.violations.push_back("duplicate state name \"" + name + "\"");
    check_rate_matrix(schema.node_rates, m, "node transitions", report);
    for (std::size_t l = 0; l < schema.layers.size(); ++l) {
        const auto& layer = schema.layers[l];
        const std::string what = "layer " + std::to_string(l) +
                                 (layer.layer_name.empty() ? "" : " (" + layer.layer_name + ")");
        if (layer.inducer >= m)
            report.violations.push_back(what + ": inducer state index " +
                                        std::to_string(layer.inducer) + " out of range");
        check_rate_matrix(layer.rates, m, what, report);
    }
    return report;
}

// DTMC step probability -> equivalent CTMC rate.
inline double dtmc_to_ctmc_rate(double p, double dt) {
    if (!(p >= 0.0) || p >= 1.0) throw std::domain_error("probability must be in [0,1)");
    if (!(dt > 0.0)) throw std::domain_error("time step must be positive");
    return -std::log1p(-p) / dt;
}

// --- preset models ------------------------------------------------------

inline void require_rate(double r, const char* name) {
    if (!(r >= 0.0) || !std::isfinite(r))
        throw std::invalid_argument(std::string(name) + " must be a finite nonnegative rate");
}

inline ModelSchema preset_sis(double beta, double delta) {
    require_rate(beta, "beta");
    require_rate(delta, "delta");
    ModelSchema m;
    m.state_names = {"S", "I"};
    m.node_rates = RateMatrix(2);
    m.node_rates(1, 0) = delta;
    EdgeMechanism contact{"contact", 1, RateMatrix(2)};
    contact.rates(0, 1) = beta;
    m.layers = {contact};
    return m;
}

inline ModelSchema preset_sir(double beta, double delta) {
    require_rate(beta, "beta");
    require_rate(delta, "delta");
    ModelSchema m;
    m.state_names = {"S", "I", "R"};
    m.node_rates = RateMatrix(3);
    m.node_rates(1, 2) = delta;
    EdgeMechanism contact{"contact", 1, RateMatrix(3)};
    contact.rates(0, 1) = beta;
    m.layers = {contact};
    return m;
}

inline ModelSchema preset_seir(double beta, double sigma, double delta) {
    require_rate(beta, "beta");
    require_rate(sigma, "sigma");
    require_rate(delta, "delta");
    ModelSchema m;
    m.state_names = {"S", "E", "I", "R"};
    m.node_rates = RateMatrix(4);
    m.node_rates(1, 2) = sigma;  // E -> I
    m.node_rates(2, 3) = delta;  // I -> R
    EdgeMechanism contact{"contact", 2, RateMatrix(4)};
    contact.rates(0, 1) = beta;  // S -> E induced by I
    m.layers = {contact};
    return m;
}

// SI1..ILS: L competing infections, layer k induced by I_k, uniform recovery.
inline ModelSchema preset_competitive_sis(std::size_t num_layers, const std::vector<double>& betas,
                                          double delta) {
    if (num_layers < 1) throw std::invalid_argument("competitive_sis: needs at least one layer");
    if (betas.size() != num_layers)
        throw std::invalid_argument("competitive_sis: one beta per layer required");
    for (double b : betas) require_rate(b, "beta");
    require_rate(delta, "delta");
    const std::size_t states = num_layers + 1;
    ModelSchema m;
    m.state_names.push_back("S");
    for (std::size_t k = 1; k <= num_layers; ++k) m.state_names.push_back("I" + std::to_string(k));
    m.node_rates = RateMatrix(states);
    for (std::size_t k = 1; k <= num_layers; ++k) m.node_rates(k, 0) = delta;
    for (std::size_t k = 1; k <= num_layers; ++k) {
        EdgeMechanism layer{"contact" + std::to_string(k), static_cast<StateId>(k),
                            RateMatrix(states)};
        layer.rates(0, k) = betas[k - 1];
        m.layers.push_back(std::move(layer));
    }
    return m;
}

// --- compiled model -----------------------------------------------------

// Schema bound to a network, with the per-state row sums and relevance sets
// the event loop needs precomputed.
class CompiledModel {
public:
    CompiledModel(ModelSchema schema, const MultilayerNetwork& net)
        : schema_(std::move(schema)), net_(&net) {
        const auto report = validate(schema_);
        if (!report.ok())
            throw std::invalid_argument("invalid model schema:\n" + report.to_string());
        if (schema_.layers.size() != net.layer_count())
            throw std::invalid_argument("model declares " + std::to_string(schema_.layers.size()) +
                                        " mechanism layer(s) but the network has " +
                                        std::to_string(net.layer_count()));
        const std::size_t m = schema_.state_count();
        const std::size_t layers = schema_.layers.size();
        node_exit_.resize(m);
        for (std::size_t s = 0; s < m; ++s) node_exit_[s] = schema_.node_rates.row_sum(s);
        // state-major so a node's exit rates across layers are contiguous
        edge_exit_.assign(m * std::max<std::size_t>(layers, 1), 0.0);
        for (std::size_t l = 0; l < layers; ++l)
            for (std::size_t s = 0; s < m; ++s)
                edge_exit_[s * layers + l] = schema_.layers[l].rates.row_sum(s);
        // nonzero transitions per source state, for destination sampling
        node_out_.resize(m);
        edge_out_.resize(m);
        for (std::size_t s = 0; s < m; ++s) {
            for (std::size_t d = 0; d < m; ++d)
                if (schema_.node_rates(s, d) > 0.0)
                    node_out_[s].push_back({static_cast<StateId>(d), schema_.node_rates(s, d)});
            for (std::size_t l = 0; l < layers; ++l)
                for (std::size_t d = 0; d < m; ++d)
                    if (schema_.layers[l].rates(s, d) > 0.0)
                        edge_out_[s].push_back(
                            {l, static_cast<StateId>(d), schema_.layers[l].rates(s, d)});
        }
    }

    struct NodeTransition {
        StateId to;
        double rate;
    };
    struct EdgeTransition {
        std::size_t layer;
        StateId to;
        double rate;  // per unit influence
    };

    const ModelSchema& schema() const { return schema_; }
    const MultilayerNetwork& network() const { return *net_; }
    std::size_t state_count() const { return schema_.state_count(); }
    std::size_t layer_count() const { return schema_.layers.size(); }
    StateId inducer(std::size_t layer) const { return schema_.layers[layer].inducer; }

    double node_exit_rate(StateId s) const { return node_exit_[s]; }
    // total edge-based exit rate of a state in a layer, per unit influence
    double edge_exit_rate(std::size_t layer, StateId s) const {
        return edge_exit_[s * layer_count() + layer];
    }
    // per-layer edge-based exit rates of one state, aligned with influence rows
    std::span<const double> edge_exit_row(StateId s) const {
        return std::span(edge_exit_).subspan(s * layer_count(), layer_count());
    }
    // constraint 3: a state is relevant in a layer iff it has any edge-based way out
    bool relevant(std::size_t layer, StateId s) const { return edge_exit_rate(layer, s) > 0.0; }

    const std::vector<NodeTransition>& node_transitions(StateId s) const { return node_out_[s]; }
    const std::vector<EdgeTransition>& edge_transitions(StateId s) const { return edge_out_[s]; }

    std::vector<StateId> relevance_set(std::size_t layer) const {
        std::vector<StateId> out;
        for (std::size_t s = 0; s < state_count(); ++s)
            if (relevant(layer, static_cast<StateId>(s))) out.push_back(static_cast<StateId>(s));
        return out;
    }

    // a state with no node-based and no edge-based exits can never leave the queue set
    bool state_can_exit(StateId s) const {
        if (node_exit_[s] > 0.0) return true;
        for (std::size_t l = 0; l < layer_count(); ++l)
            if (edge_exit_rate(l, s) > 0.0) return true;
        return false;
    }

    // FNV-1a over the schema's defining data, for log headers
    std::uint64_t digest() const {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        auto mix_bytes = [&h](const void* p, std::size_t n) {
            const auto* b = static_cast<const unsigned char*>(p);
            for (std::size_t i = 0; i < n; ++i) {
                h ^= b[i];
                h *= 0x100000001b3ULL;
            }
        };
        for (const auto& name : schema_.state_names) mix_bytes(name.data(), name.size());
        const std::size_t m = schema_.state_count();
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) {
                const double r = schema_.node_rates(i, j);
                mix_bytes(&r, sizeof r);
            }
        for (const auto& layer : schema_.layers) {
            mix_bytes(layer.layer_name.data(), layer.layer_name.size());
            mix_bytes(&layer.inducer, sizeof layer.inducer);
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < m; ++j) {
                    const double r = layer.rates(i, j);
                    mix_bytes(&r, sizeof r);
                }
        }
        return h;
    }

private:
    ModelSchema schema_;
    const MultilayerNetwork* net_;
    std::vector<double> node_exit_;
    std::vector<double> edge_exit_;  // M x L, state-major
    std::vector<std::vector<NodeTransition>> node_out_;
    std::vector<std::vector<EdgeTransition>> edge_out_;
};

}  // namespace spreadnet

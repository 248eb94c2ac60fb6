#pragma once

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "spreadnet/graph.hpp"
#include "spreadnet/model.hpp"

namespace spreadnet {

struct LayerNetworkRef {
    std::string path;
    bool directed = false;
    double default_weight = 1.0;
};

// A model config file pairs the schema with the edge-list file of each layer.
struct ModelConfig {
    ModelSchema schema;
    std::vector<LayerNetworkRef> networks;  // one per schema layer, in order
};

namespace detail {

inline StateId state_ref(const ModelSchema& schema, const nlohmann::json& j,
                         const std::string& context) {
    if (!j.is_string())
        throw std::runtime_error("model config: " + context + " must be a state name");
    const int idx = schema.state_index(j.get<std::string>());
    if (idx < 0)
        throw std::runtime_error("model config: unknown state \"" + j.get<std::string>() +
                                 "\" in " + context);
    return static_cast<StateId>(idx);
}

inline void fill_transitions(const ModelSchema& schema, RateMatrix& m, const nlohmann::json& arr,
                             const std::string& context) {
    if (!arr.is_array())
        throw std::runtime_error("model config: " + context + " must be an array");
    for (const auto& t : arr) {
        const StateId from = state_ref(schema, t.at("from"), context + ".from");
        const StateId to = state_ref(schema, t.at("to"), context + ".to");
        const double rate = t.at("rate").get<double>();
        m(from, to) += rate;
    }
}

}  // namespace detail

inline ModelConfig parse_model_config(const nlohmann::json& j) {
    ModelConfig cfg;
    const auto& states = j.at("states");
    if (!states.is_array() || states.size() < 2)
        throw std::runtime_error("model config: \"states\" must list at least 2 states");
    for (const auto& s : states) cfg.schema.state_names.push_back(s.get<std::string>());

    const std::size_t m = cfg.schema.state_names.size();
    cfg.schema.node_rates = RateMatrix(m);
    if (j.contains("node_transitions"))
        detail::fill_transitions(cfg.schema, cfg.schema.node_rates, j.at("node_transitions"),
                                 "node_transitions");

    for (const auto& layer : j.at("layers")) {
        EdgeMechanism mech;
        mech.layer_name = layer.value("name", "");
        mech.inducer = detail::state_ref(cfg.schema, layer.at("inducer"), "layer inducer");
        mech.rates = RateMatrix(m);
        detail::fill_transitions(cfg.schema, mech.rates, layer.at("edge_transitions"),
                                 "edge_transitions");
        cfg.schema.layers.push_back(std::move(mech));

        LayerNetworkRef ref;
        ref.path = layer.at("network").get<std::string>();
        ref.directed = layer.value("directed", false);
        ref.default_weight = layer.value("default_weight", 1.0);
        cfg.networks.push_back(std::move(ref));
    }

    const auto report = validate(cfg.schema);
    if (!report.ok())
        throw std::runtime_error("model config: invalid schema:\n" + report.to_string());
    return cfg;
}

inline ModelConfig load_model_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model config: " + path);
    nlohmann::json j;
    try {
        in >> j;
        ModelConfig cfg = parse_model_config(j);
        // network paths are relative to the config file
        const auto base = std::filesystem::path(path).parent_path();
        for (auto& ref : cfg.networks)
            if (!std::filesystem::path(ref.path).is_absolute())
                ref.path = (base / ref.path).string();
        return cfg;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

inline MultilayerNetwork load_network(const ModelConfig& cfg) {
    std::vector<LayerGraph> layers;
    layers.reserve(cfg.networks.size());
    for (const auto& ref : cfg.networks)
        layers.push_back(load_edge_list(ref.path, ref.directed, ref.default_weight));
    return MultilayerNetwork(std::move(layers));
}

}  // namespace spreadnet

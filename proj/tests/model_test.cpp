#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "spreadnet/model.hpp"
#include "spreadnet/model_io.hpp"

using namespace spreadnet;

namespace {

MultilayerNetwork tiny_net(std::size_t layers = 1) {
    const LayerGraph g = LayerGraph::from_arcs(3, {{0, 1, 1.0}, {1, 2, 1.0}});
    return MultilayerNetwork(std::vector<LayerGraph>(layers, g));
}

}  // namespace

TEST(Validate, PresetsAreValid) {
    EXPECT_TRUE(validate(preset_sis(0.5, 0.7)).ok());
    EXPECT_TRUE(validate(preset_sir(0.005, 0.01)).ok());
    EXPECT_TRUE(validate(preset_seir(0.1, 0.2, 0.3)).ok());
    EXPECT_TRUE(validate(preset_competitive_sis(3, {1.0, 2.0, 3.0}, 1.0)).ok());
    EXPECT_TRUE(validate(preset_sis(0.0, 0.0)).ok());
}

TEST(Validate, NonzeroDiagonalReported) {
    ModelSchema schema = preset_sis(0.5, 0.7);
    schema.node_rates(0, 0) = 0.1;
    const auto report = validate(schema);
    ASSERT_FALSE(report.ok());
    EXPECT_NE(report.to_string().find("nonzero diagonal"), std::string::npos);
}

TEST(Validate, InducerOutOfRangeReported) {
    ModelSchema schema = preset_sis(0.5, 0.7);
    schema.layers[0].inducer = 2;  // M = 2
    const auto report = validate(schema);
    ASSERT_FALSE(report.ok());
    EXPECT_NE(report.to_string().find("out of range"), std::string::npos);
}

TEST(Validate, CollectsAllViolations) {
    ModelSchema schema;
    schema.state_names = {"A", "A"};  // duplicate
    schema.node_rates = RateMatrix(2);
    schema.node_rates(0, 1) = -1.0;  // negative
    schema.node_rates(1, 1) = 0.5;   // diagonal
    const auto report = validate(schema);
    EXPECT_GE(report.violations.size(), 3u);
}

TEST(Validate, TooFewStates) {
    ModelSchema schema;
    schema.state_names = {"only"};
    schema.node_rates = RateMatrix(1);
    EXPECT_FALSE(validate(schema).ok());
}

TEST(Compile, LayerCountMismatch) {
    const auto net1 = tiny_net(1);
    const auto net2 = tiny_net(2);
    EXPECT_NO_THROW(CompiledModel(preset_sir(0.1, 0.2), net1));
    EXPECT_THROW(CompiledModel(preset_sir(0.1, 0.2), net2), std::invalid_argument);
}

TEST(Compile, RelevanceSets) {
    const auto net = tiny_net(2);
    const CompiledModel model(preset_competitive_sis(2, {1.0, 1.0}, 1.0), net);
    // only S (state 0) has an edge-based way out on each layer
    EXPECT_EQ(model.relevance_set(0), std::vector<StateId>{0});
    EXPECT_EQ(model.relevance_set(1), std::vector<StateId>{0});
}

TEST(Compile, CompetitiveSisStructure) {
    const ModelSchema m = preset_competitive_sis(2, {1.0, 1.0}, 1.0);
    ASSERT_EQ(m.state_count(), 3u);
    ASSERT_EQ(m.layers.size(), 2u);
    EXPECT_EQ(m.layers[0].inducer, 1);
    EXPECT_EQ(m.layers[1].inducer, 2);
    EXPECT_DOUBLE_EQ(m.node_rates(1, 0), 1.0);
    EXPECT_DOUBLE_EQ(m.node_rates(2, 0), 1.0);
    EXPECT_DOUBLE_EQ(m.layers[0].rates(0, 1), 1.0);
    EXPECT_DOUBLE_EQ(m.layers[1].rates(0, 2), 1.0);
}

TEST(Presets, SirRatesFromRateArguments) {
    const ModelSchema m = preset_sir(0.005, 0.01);
    EXPECT_DOUBLE_EQ(m.node_rates(1, 2), 0.01);
    EXPECT_DOUBLE_EQ(m.layers[0].rates(0, 1), 0.005);
    EXPECT_EQ(m.layers[0].inducer, 1);
}

TEST(Presets, SeirShape) {
    const ModelSchema m = preset_seir(0.3, 0.2, 0.1);
    // S -> E edge-based, E -> I and I -> R node-based, induced by I
    EXPECT_DOUBLE_EQ(m.layers[0].rates(0, 1), 0.3);
    EXPECT_DOUBLE_EQ(m.node_rates(1, 2), 0.2);
    EXPECT_DOUBLE_EQ(m.node_rates(2, 3), 0.1);
    EXPECT_EQ(m.layers[0].inducer, 2);
}

TEST(Presets, NegativeRateRejected) {
    EXPECT_THROW(preset_sis(-0.1, 0.1), std::invalid_argument);
    EXPECT_THROW(preset_seir(0.1, 0.1, -1.0), std::invalid_argument);
    EXPECT_THROW(preset_competitive_sis(2, {0.1}, 0.1), std::invalid_argument);
}

TEST(DtmcConversion, KnownValues) {
    EXPECT_DOUBLE_EQ(dtmc_to_ctmc_rate(0.0, 1.0), 0.0);
    EXPECT_NEAR(dtmc_to_ctmc_rate(0.01, 1.0), 0.010050335853501441, 1e-15);
    EXPECT_NEAR(dtmc_to_ctmc_rate(0.5, 2.0), 0.34657359027997264, 1e-15);
}

TEST(DtmcConversion, DomainErrors) {
    EXPECT_THROW(dtmc_to_ctmc_rate(1.0, 1.0), std::domain_error);
    EXPECT_THROW(dtmc_to_ctmc_rate(-0.1, 1.0), std::domain_error);
    EXPECT_THROW(dtmc_to_ctmc_rate(0.5, 0.0), std::domain_error);
}

TEST(DtmcConversion, MonotoneAndRoundTrips) {
    double prev = -1.0;
    for (double p = 0.0; p < 0.999; p += 0.037) {
        const double rate = dtmc_to_ctmc_rate(p, 0.5);
        EXPECT_GT(rate, prev);
        prev = rate;
        const double back = 1.0 - std::exp(-rate * 0.5);
        EXPECT_NEAR(back, p, 1e-12 * std::max(1.0, p));
    }
}

TEST(ModelConfig, ParsesSirJson) {
    const auto j = nlohmann::json::parse(R"({
        "states": ["S", "I", "R"],
        "node_transitions": [{"from": "I", "to": "R", "rate": 0.01}],
        "layers": [{
            "name": "contact",
            "inducer": "I",
            "edge_transitions": [{"from": "S", "to": "I", "rate": 0.005}],
            "network": "net.edges",
            "directed": false
        }]
    })");
    const ModelConfig cfg = parse_model_config(j);
    EXPECT_DOUBLE_EQ(cfg.schema.node_rates(1, 2), 0.01);
    EXPECT_DOUBLE_EQ(cfg.schema.layers[0].rates(0, 1), 0.005);
    EXPECT_EQ(cfg.schema.layers[0].inducer, 1);
    ASSERT_EQ(cfg.networks.size(), 1u);
    EXPECT_EQ(cfg.networks[0].path, "net.edges");
    EXPECT_FALSE(cfg.networks[0].directed);
}

TEST(ModelConfig, UnknownStateRejected) {
    const auto j = nlohmann::json::parse(R"({
        "states": ["S", "I"],
        "node_transitions": [{"from": "I", "to": "X", "rate": 0.01}],
        "layers": []
    })");
    EXPECT_THROW(parse_model_config(j), std::runtime_error);
}

TEST(ModelDigest, SensitiveToRates) {
    const auto net = tiny_net(1);
    const CompiledModel a(preset_sir(0.005, 0.01), net);
    const CompiledModel b(preset_sir(0.005, 0.02), net);
    const CompiledModel c(preset_sir(0.005, 0.01), net);
    EXPECT_NE(a.digest(), b.digest());
    EXPECT_EQ(a.digest(), c.digest());
}

#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "spreadnet/engine.hpp"
#include "spreadnet/generators.hpp"
#include "spreadnet/model.hpp"
#include "spreadnet/observables.hpp"

using namespace spreadnet;

namespace {

EventLog tiny_log() {
    // 3 nodes, SIR-shaped labels, two events
    EventLog log;
    log.node_count = 3;
    log.state_names = {"S", "I", "R"};
    log.initial_states = {1, 0, 0};
    log.records = {{0.5, 1, 0, 1}, {2.0, 0, 1, 2}};
    log.final_time = 2.0;
    return log;
}

EventLog run_log(std::uint64_t seed) {
    std::vector<LayerGraph> layers;
    layers.push_back(generate_erdos_renyi(30, 0.2, 4));
    const MultilayerNetwork net(std::move(layers));
    const CompiledModel model(preset_sir(0.3, 0.2), net);
    RunConfig cfg;
    cfg.init = InitialCondition::from_counts({28, 2, 0});
    cfg.seed = seed;
    return make_log(model, run(model, cfg, Rng::for_run(cfg.seed, 0)), seed);
}

}  // namespace

TEST(CountsOnGrid, StepFunctionAtHandPickedTimes) {
    const EventLog log = tiny_log();
    const TimeSeries ts = counts_on_grid(log, {0.0, 0.5, 1.0, 2.0, 3.0});
    ASSERT_EQ(ts.state_count, 3u);
    // t=0: {2,1,0}; t=0.5 (inclusive of the event at 0.5): {1,2,0}
    EXPECT_EQ(ts.at(0, 0), 2.0);
    EXPECT_EQ(ts.at(0, 1), 1.0);
    EXPECT_EQ(ts.at(1, 0), 1.0);
    EXPECT_EQ(ts.at(1, 1), 2.0);
    EXPECT_EQ(ts.at(2, 1), 2.0);
    // t=2.0: recovery applied; t=3.0 frozen at the absorbed counts
    EXPECT_EQ(ts.at(3, 1), 1.0);
    EXPECT_EQ(ts.at(3, 2), 1.0);
    EXPECT_EQ(ts.at(4, 1), 1.0);
    EXPECT_EQ(ts.at(4, 2), 1.0);
}

TEST(CountsOnGrid, RowsAlwaysSumToN) {
    const EventLog log = run_log(11);
    const TimeSeries ts = counts_on_grid(log, uniform_grid(log.final_time, 64));
    for (std::size_t k = 0; k < ts.grid.size(); ++k) {
        double sum = 0.0;
        for (std::size_t s = 0; s < ts.state_count; ++s) sum += ts.at(k, s);
        EXPECT_EQ(sum, 30.0);
    }
}

TEST(CountsOnGrid, RejectsBadGrids) {
    const EventLog log = tiny_log();
    EXPECT_THROW(counts_on_grid(log, {1.0, 0.5}), std::invalid_argument);
    EXPECT_THROW(counts_on_grid(log, {0.0, 5.0}, /*absorbed=*/false), std::out_of_range);
}

TEST(Replay, ReachesFinalStatesOfRealRun) {
    const EventLog log = run_log(21);
    const auto final_states = replay(log);
    std::vector<std::uint64_t> counts(3, 0);
    for (StateId s : final_states) ++counts[s];
    EXPECT_EQ(counts[1], 0u);  // absorbed SIR has no infectious nodes
}

TEST(Replay, DetectsCorruptedRecord) {
    EventLog log = tiny_log();
    log.records[1].from_state = 0;  // node 0 is infectious at that point
    EXPECT_THROW(replay(log), std::runtime_error);
    EventLog reordered = tiny_log();
    std::swap(reordered.records[0], reordered.records[1]);
    EXPECT_THROW(replay(reordered), std::runtime_error);
}

TEST(EnsembleMean, SingleRunIsItsOwnMean) {
    const EventLog log = tiny_log();
    const TimeSeries ts = counts_on_grid(log, {0.0, 1.0, 2.0});
    const TimeSeries mean = ensemble_mean({ts}, 3);
    for (std::size_t c = 0; c < mean.values.size(); ++c) {
        EXPECT_DOUBLE_EQ(mean.values[c], ts.values[c] / 3.0);
        EXPECT_DOUBLE_EQ(mean.stddev[c], 0.0);
    }
}

TEST(EnsembleMean, AveragesAndIsOrderInvariant) {
    TimeSeries a, b;
    a.grid = b.grid = {0.0, 1.0};
    a.state_count = b.state_count = 2;
    a.values = {4.0, 0.0, 2.0, 2.0};
    b.values = {0.0, 4.0, 2.0, 2.0};
    const TimeSeries ab = ensemble_mean({a, b}, 4);
    const TimeSeries ba = ensemble_mean({b, a}, 4);
    EXPECT_EQ(ab.values, ba.values);
    EXPECT_EQ(ab.stddev, ba.stddev);
    EXPECT_DOUBLE_EQ(ab.at(0, 0), 0.5);
    EXPECT_DOUBLE_EQ(ab.at(0, 1), 0.5);
    EXPECT_DOUBLE_EQ(ab.at(1, 0), 0.5);
    EXPECT_DOUBLE_EQ(ab.stddev[0], 0.5);
    EXPECT_DOUBLE_EQ(ab.stddev[2], 0.0);
}

TEST(EnsembleMean, MismatchedGridsRejected) {
    TimeSeries a, b;
    a.grid = {0.0, 1.0};
    b.grid = {0.0, 2.0};
    a.state_count = b.state_count = 1;
    a.values = b.values = {1.0, 1.0};
    EXPECT_THROW(ensemble_mean({a, b}, 1), std::invalid_argument);
    EXPECT_THROW(ensemble_mean({}, 1), std::invalid_argument);
}

TEST(LogFormat, RoundTripsVerbatim) {
    const EventLog log = run_log(33);
    std::stringstream buf;
    write_log(buf, log);
    const EventLog back = read_log(buf);
    EXPECT_EQ(back.node_count, log.node_count);
    EXPECT_EQ(back.state_names, log.state_names);
    EXPECT_EQ(back.seed, log.seed);
    EXPECT_EQ(back.model_digest, log.model_digest);
    EXPECT_EQ(back.initial_states, log.initial_states);
    EXPECT_EQ(back.final_time, log.final_time);
    ASSERT_EQ(back.records.size(), log.records.size());
    for (std::size_t k = 0; k < log.records.size(); ++k) EXPECT_EQ(back.records[k], log.records[k]);
}

TEST(LogFormat, SecondWriteIsByteIdentical) {
    const EventLog log = run_log(7);
    std::stringstream a, b;
    write_log(a, log);
    write_log(b, log);
    EXPECT_EQ(a.str(), b.str());
}

TEST(LogFormat, TruncatedAndMalformedInputsRejected) {
    const EventLog log = tiny_log();
    std::stringstream buf;
    write_log(buf, log);
    const std::string text = buf.str();

    std::stringstream missing_magic(text.substr(text.find('\n') + 1));
    EXPECT_THROW(read_log(missing_magic), std::runtime_error);

    std::stringstream truncated(text.substr(0, text.find("time,node")));
    EXPECT_THROW(read_log(truncated), std::runtime_error);

    std::stringstream bad_row(text + "0.1,not_a_node,0,1\n");
    EXPECT_THROW(read_log(bad_row), std::runtime_error);
}

TEST(LogFormat, ReplayOfParsedLogMatchesEngine) {
    std::vector<LayerGraph> layers;
    layers.push_back(generate_erdos_renyi(30, 0.2, 4));
    const MultilayerNetwork net(std::move(layers));
    const CompiledModel model(preset_sir(0.3, 0.2), net);
    RunConfig cfg;
    cfg.init = InitialCondition::from_counts({28, 2, 0});
    cfg.seed = 33;
    const RunResult result = run(model, cfg, Rng::for_run(cfg.seed, 0));
    std::stringstream buf;
    write_log(buf, make_log(model, result, cfg.seed));
    EXPECT_EQ(replay(read_log(buf)), result.final_states);
}

TEST(TimeSeriesFormat, HeaderNamesStates) {
    const EventLog log = tiny_log();
    const TimeSeries ts = counts_on_grid(log, {0.0, 2.0});
    std::stringstream buf;
    write_time_series(buf, ts, log.state_names);
    std::string header;
    std::getline(buf, header);
    EXPECT_EQ(header, "t,count_S,count_I,count_R");
}

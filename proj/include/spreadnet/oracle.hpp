#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "spreadnet/engine.hpp"
#include "spreadnet/model.hpp"
#include "spreadnet/rng.hpp"

namespace spreadnet {

// The conventional direct method: every event regenerates a waiting time for
// every node with positive rate, takes the argmin, and recomputes all rates
// from scratch. Theta(N) per event; serves as the statistical ground truth
// the event-driven engine is checked against.
class OracleSimulation {
public:
    OracleSimulation(const CompiledModel& model, const RunConfig& cfg)
        : OracleSimulation(model, cfg, Rng(cfg.seed)) {}

    OracleSimulation(const CompiledModel& model, const RunConfig& cfg, Rng rng)
        : model_(&model), rng_(rng) {
        const auto& net = model.network();
        const NodeId n = net.node_count();
        const std::size_t m = model.state_count();
        if (cfg.init.uses_counts()) {
            if (cfg.init.counts.size() != m)
                throw std::invalid_argument("initial condition: one count per state required");
            std::uint64_t total = 0;
            for (auto c : cfg.init.counts) total += c;
            if (total != n) throw std::invalid_argument("initial condition: counts must sum to N");
            states_.clear();
            for (std::size_t s = 0; s < m; ++s)
                states_.insert(states_.end(), cfg.init.counts[s], static_cast<StateId>(s));
            for (NodeId i = n; i > 1; --i)
                std::swap(states_[i - 1], states_[rng_.uniform_index(i)]);
        } else {
            if (cfg.init.explicit_states.size() != n)
                throw std::invalid_argument("initial condition: one state per node required");
            states_ = cfg.init.explicit_states;
        }
        counts_.assign(m, 0);
        for (StateId s : states_) ++counts_[s];
        recompute_rates();
    }

    const std::vector<StateId>& states() const { return states_; }
    const std::vector<std::uint64_t>& state_counts() const { return counts_; }
    double current_time() const { return t_current_; }
    std::uint64_t event_count() const { return event_count_; }
    double rate_of(NodeId i) const { return lambda_[i]; }
    bool absorbed() const { return active_ == 0; }

    std::optional<EventRecord> step() {
        if (active_ == 0) return std::nullopt;
        // fresh waiting time for every active node, argmin wins
        NodeId winner = 0;
        double best = std::numeric_limits<double>::infinity();
        for (NodeId i = 0; i < states_.size(); ++i) {
            if (lambda_[i] <= 0.0) continue;
            const double tau = rng_.exponential(lambda_[i]);
            if (tau < best) {
                best = tau;
                winner = i;
            }
        }
        t_current_ += best;

        const StateId old_state = states_[winner];
        const StateId new_state = sample_destination(winner, old_state);
        states_[winner] = new_state;
        --counts_[old_state];
        ++counts_[new_state];
        recompute_rates();
        ++event_count_;
        return EventRecord{t_current_, winner, old_state, new_state};
    }

private:
    void recompute_rates() {
        const auto& net = model_->network();
        const NodeId n = net.node_count();
        const std::size_t layers = model_->layer_count();
        influence_.assign(static_cast<std::size_t>(n) * layers, 0.0);
        for (std::size_t l = 0; l < layers; ++l) {
            const StateId q = model_->inducer(l);
            for (NodeId j = 0; j < n; ++j) {
                if (states_[j] != q) continue;
                for (auto [i, w] : net.layer(l).out_neighbors(j)) influence_[i * layers + l] += w;
            }
        }
        lambda_.assign(n, 0.0);
        active_ = 0;
        for (NodeId i = 0; i < n; ++i) {
            lambda_[i] =
                node_rate(*model_, states_[i], std::span(influence_).subspan(i * layers, layers));
            if (lambda_[i] > 0.0) ++active_;
        }
    }

    StateId sample_destination(NodeId node, StateId from) {
        const std::size_t m = model_->state_count();
        const std::size_t layers = model_->layer_count();
        std::vector<double> rates(m, 0.0);
        double total = 0.0;
        for (const auto& t : model_->node_transitions(from)) {
            rates[t.to] += t.rate;
            total += t.rate;
        }
        for (const auto& t : model_->edge_transitions(from)) {
            const double r = t.rate * influence_[node * layers + t.layer];
            rates[t.to] += r;
            total += r;
        }
        if (!(total > 0.0)) throw std::logic_error("oracle: winner has zero total rate");
        const double u = rng_.uniform_open() * total;
        double acc = 0.0;
        for (std::size_t s = 0; s < m; ++s) {
            acc += rates[s];
            if (u <= acc && rates[s] > 0.0) return static_cast<StateId>(s);
        }
        for (std::size_t s = m; s-- > 0;)
            if (rates[s] > 0.0) return static_cast<StateId>(s);
        throw std::logic_error("oracle: destination sampling failed");
    }

    const CompiledModel* model_;
    Rng rng_;
    std::vector<StateId> states_;
    std::vector<std::uint64_t> counts_;
    std::vector<double> influence_;
    std::vector<double> lambda_;
    std::size_t active_ = 0;
    double t_current_ = 0.0;
    std::uint64_t event_count_ = 0;
};

// Same stop semantics as the event-driven engine's run().
inline RunResult oracle_run_loop(OracleSimulation& sim, const RunConfig& cfg) {
    RunResult result;
    result.initial_states = sim.states();

    const StopCondition& stop = cfg.stop;
    auto finish = [&](StopReason reason, double final_time) {
        result.final_states = sim.states();
        result.final_time = final_time;
        result.reason = reason;
        return result;
    };

    if (detail::state_count_met(sim.state_counts(), stop))
        return finish(StopReason::StateCountReached, 0.0);

    for (;;) {
        if (stop.kind == StopCondition::Kind::MaxEvents && sim.event_count() >= stop.event_limit)
            return finish(StopReason::MaxEventsReached, sim.current_time());
        if (sim.absorbed()) return finish(StopReason::Absorbed, sim.current_time());
        const auto event = sim.step();
        if (stop.kind == StopCondition::Kind::MaxTime && event->time > stop.horizon) {
            // the over-horizon event is not emitted and not applied to the result
            auto r = finish(StopReason::HorizonReached, stop.horizon);
            r.final_states[event->node] = event->from_state;
            return r;
        }
        result.events.push_back(*event);
        if (detail::state_count_met(sim.state_counts(), stop))
            return finish(StopReason::StateCountReached, sim.current_time());
    }
}

inline RunResult oracle_run(const CompiledModel& model, const RunConfig& cfg) {
    OracleSimulation sim(model, cfg);
    return oracle_run_loop(sim, cfg);
}

inline RunResult oracle_run(const CompiledModel& model, const RunConfig& cfg, Rng rng) {
    OracleSimulation sim(model, cfg, rng);
    return oracle_run_loop(sim, cfg);
}

}  // namespace spreadnet

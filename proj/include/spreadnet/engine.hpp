#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "spreadnet/model.hpp"
#include "spreadnet/queue.hpp"
#include "spreadnet/rng.hpp"

namespace spreadnet {

struct EventRecord {
    double time;
    NodeId node;
    StateId from_state;
    StateId to_state;

    friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

enum class EngineMode { Sparse, Dense, Auto };

inline EngineMode select_mode(const MultilayerNetwork& net, EngineMode requested) {
    if (requested != EngineMode::Auto) return requested;
    return net.mean_degree() > 0.05 * static_cast<double>(net.node_count()) ? EngineMode::Dense
                                                                            : EngineMode::Sparse;
}

struct StopCondition {
    enum class Kind { MaxTime, MaxEvents, Absorption, StateCount };
    Kind kind = Kind::Absorption;
    double horizon = 0.0;
    std::uint64_t event_limit = 0;
    StateId state = 0;
    std::uint64_t threshold = 0;

    static StopCondition max_time(double t) { return {Kind::MaxTime, t, 0, 0, 0}; }
    static StopCondition max_events(std::uint64_t k) { return {Kind::MaxEvents, 0.0, k, 0, 0}; }
    static StopCondition absorption() { return {Kind::Absorption, 0.0, 0, 0, 0}; }
    static StopCondition state_count(StateId s, std::uint64_t threshold) {
        return {Kind::StateCount, 0.0, 0, s, threshold};
    }
};

struct InitialCondition {
    // exactly one of the two is used
    std::vector<StateId> explicit_states;   // per-node assignment
    std::vector<std::uint64_t> counts;      // per-state counts, placed randomly

    static InitialCondition from_states(std::vector<StateId> states) {
        InitialCondition ic;
        ic.explicit_states = std::move(states);
        return ic;
    }
    static InitialCondition from_counts(std::vector<std::uint64_t> counts) {
        InitialCondition ic;
        ic.counts = std::move(counts);
        return ic;
    }
    bool uses_counts() const { return explicit_states.empty(); }
};

struct RunConfig {
    InitialCondition init;
    StopCondition stop = StopCondition::absorption();
    std::uint64_t seed = 0;
    EngineMode mode = EngineMode::Auto;
    std::uint64_t audit_every = 0;  // 0 = audits off
};

enum class StopReason { Absorbed, HorizonReached, MaxEventsReached, StateCountReached };

struct RunResult {
    std::vector<StateId> initial_states;
    std::vector<EventRecord> events;
    std::vector<StateId> final_states;
    double final_time = 0.0;
    StopReason reason = StopReason::Absorbed;
};

// Total exit rate of node i given its state and its per-layer influence row.
inline double node_rate(const CompiledModel& model, StateId state,
                        std::span<const double> influence_row) {
    double lambda = model.node_exit_rate(state);
    const std::span<const double> exits = model.edge_exit_row(state);
    for (std::size_t l = 0; l < influence_row.size(); ++l) lambda += exits[l] * influence_row[l];
    return lambda;
}

namespace detail {

// Sparse mode keeps the indexed heap; dense mode keeps a flat time array with
// linear-scan minimum and O(1) updates. Both expose the same surface so the
// event loop, and in particular its random-draw order, is shared.
class TimeTable {
public:
    TimeTable(NodeId n, bool dense) : dense_(dense) {
        if (dense_)
            times_.assign(n, kInf);
        else
            heap_.emplace(n);
    }

    bool empty() const { return dense_ ? active_ == 0 : heap_->empty(); }
    std::size_t size() const { return dense_ ? active_ : heap_->size(); }

    bool contains(NodeId node) const {
        return dense_ ? times_[node] != kInf : heap_->contains(node);
    }

    void push(NodeId node, double time) {
        if (dense_) {
            if (times_[node] != kInf) throw std::logic_error("time table push: node present");
            times_[node] = time;
            ++active_;
        } else {
            heap_->push(node, time);
        }
    }

    void update(NodeId node, double time) {
        if (dense_) {
            if (times_[node] == kInf) throw std::logic_error("time table update: node absent");
            times_[node] = time;
        } else {
            heap_->update(node, time);
        }
    }

    // rekey the entry that peek_min currently reports
    void replace_min(NodeId node, double time) {
        if (dense_) {
            times_[node] = time;
        } else {
            heap_->replace_min(time);
        }
    }

    void drop_min() {
        if (dense_) {
            const TimedEntry e = peek_min();
            times_[e.node] = kInf;
            --active_;
        } else {
            heap_->pop_min();
        }
    }

    // insert-or-reschedule with a single membership lookup
    void upsert(NodeId node, double time) {
        if (dense_) {
            if (times_[node] == kInf) ++active_;
            times_[node] = time;
        } else {
            heap_->upsert(node, time);
        }
    }

    void remove(NodeId node) {
        if (dense_) {
            if (times_[node] == kInf) throw std::logic_error("time table remove: node absent");
            times_[node] = kInf;
            --active_;
        } else {
            heap_->remove(node);
        }
    }

    TimedEntry peek_min() const {
        if (!dense_) return heap_->peek_min();
        if (active_ == 0) throw std::out_of_range("time table peek: empty");
        NodeId best = 0;
        double best_t = kInf;
        for (NodeId i = 0; i < times_.size(); ++i)
            if (times_[i] < best_t) {
                best_t = times_[i];
                best = i;
            }
        return {best, best_t};
    }

    TimedEntry pop_min() {
        if (!dense_) return heap_->pop_min();
        const TimedEntry e = peek_min();
        times_[e.node] = kInf;
        --active_;
        return e;
    }

private:
    static constexpr double kInf = std::numeric_limits<double>::infinity();
    bool dense_;
    std::optional<IndexedQueue> heap_;
    std::vector<double> times_;
    std::size_t active_ = 0;
};

}  // namespace detail

// One event-driven simulation run over a compiled model. Rates and influence
// sums are maintained incrementally; only the transitioning node and the
// out-neighbors whose rates actually change are rescheduled.
class Simulation {
public:
    Simulation(const CompiledModel& model, const RunConfig& cfg)
        : model_(&model),
          rng_(cfg.seed),
          mode_(select_mode(model.network(), cfg.mode)),
          table_(model.network().node_count(), mode_ == EngineMode::Dense) {
        init(cfg.init);
    }

    Simulation(const CompiledModel& model, const RunConfig& cfg, Rng rng)
        : model_(&model),
          rng_(rng),
          mode_(select_mode(model.network(), cfg.mode)),
          table_(model.network().node_count(), mode_ == EngineMode::Dense) {
        init(cfg.init);
    }

    const std::vector<StateId>& states() const { return states_; }
    const std::vector<std::uint64_t>& state_counts() const { return counts_; }
    double current_time() const { return t_current_; }
    std::uint64_t event_count() const { return event_count_; }
    EngineMode mode() const { return mode_; }
    bool absorbed() const { return table_.empty(); }
    double rate_of(NodeId i) const { return rows_[i * row_stride()]; }
    double influence(NodeId i, std::size_t layer) const {
        return rows_[i * row_stride() + 1 + layer];
    }
    // nodes rescheduled by the cautious update of the latest event
    const std::vector<NodeId>& last_touched() const { return touched_; }

    // Time of the next event, without advancing. Absorbed => nullopt.
    std::optional<double> next_event_time() const {
        if (table_.empty()) return std::nullopt;
        return table_.peek_min().time;
    }

    std::optional<EventRecord> step() {
        if (table_.empty()) return std::nullopt;
        const auto [node, time] = table_.peek_min();
        t_current_ = time;

        const StateId old_state = states_[node];
        const StateId new_state = sample_destination(node, old_state);
        states_[node] = new_state;
        --counts_[old_state];
        ++counts_[new_state];

        // reschedule the transitioning node itself, rekeying in place
        double& lam = rows_[node * row_stride()];
        lam = node_rate(*model_, new_state, influence_row(node));
        if (lam > 0.0)
            table_.replace_min(node, t_current_ + rng_.exponential(lam));
        else
            table_.drop_min();

        cautious_update(node, old_state, new_state);
        ++event_count_;
        return EventRecord{time, node, old_state, new_state};
    }

    // Scratch recomputation of every influence sum and rate, compared against
    // the incrementally maintained values; also checks queue membership.
    void audit(double rel_tol = 1e-9) const {
        const auto& net = model_->network();
        const std::size_t layers = model_->layer_count();
        std::vector<double> fresh(static_cast<std::size_t>(net.node_count()) * layers, 0.0);
        for (std::size_t l = 0; l < layers; ++l) {
            const StateId q = model_->inducer(l);
            for (NodeId j = 0; j < net.node_count(); ++j) {
                if (states_[j] != q) continue;
                for (auto [i, w] : net.layer(l).out_neighbors(j)) fresh[i * layers + l] += w;
            }
        }
        auto close = [rel_tol](double a, double b) {
            return std::abs(a - b) <= rel_tol * std::max({1.0, std::abs(a), std::abs(b)});
        };
        for (NodeId i = 0; i < net.node_count(); ++i) {
            for (std::size_t l = 0; l < layers; ++l)
                if (!close(influence(i, l), fresh[i * layers + l]))
                    throw std::logic_error("audit: influence drift at node " + std::to_string(i) +
                                           " layer " + std::to_string(l));
            const double lam =
                node_rate(*model_, states_[i], std::span(fresh).subspan(i * layers, layers));
            if (!close(rate_of(i), lam))
                throw std::logic_error("audit: rate drift at node " + std::to_string(i));
            if ((rate_of(i) > 0.0) != table_.contains(i))
                throw std::logic_error("audit: queue membership mismatch at node " +
                                       std::to_string(i));
        }
    }

private:
    std::size_t row_stride() const { return model_->layer_count() + 1; }

    std::span<const double> influence_row(NodeId i) const {
        return std::span(rows_).subspan(i * row_stride() + 1, model_->layer_count());
    }

    void init(const InitialCondition& ic) {
        const auto& net = model_->network();
        const NodeId n = net.node_count();
        const std::size_t m = model_->state_count();
        const std::size_t layers = model_->layer_count();

        if (ic.uses_counts()) {
            if (ic.counts.size() != m)
                throw std::invalid_argument("initial condition: one count per state required");
            std::uint64_t total = 0;
            for (auto c : ic.counts) total += c;
            if (total != n)
                throw std::invalid_argument("initial condition: counts sum to " +
                                            std::to_string(total) + ", expected " +
                                            std::to_string(n));
            states_.clear();
            states_.reserve(n);
            for (std::size_t s = 0; s < m; ++s)
                states_.insert(states_.end(), ic.counts[s], static_cast<StateId>(s));
            // Fisher-Yates with the run's stream, before any waiting-time draw
            for (NodeId i = n; i > 1; --i)
                std::swap(states_[i - 1], states_[rng_.uniform_index(i)]);
        } else {
            if (ic.explicit_states.size() != n)
                throw std::invalid_argument("initial condition: one state per node required");
            for (StateId s : ic.explicit_states)
                if (s >= m) throw std::invalid_argument("initial condition: state out of range");
            states_ = ic.explicit_states;
        }

        counts_.assign(m, 0);
        for (StateId s : states_) ++counts_[s];

        rows_.assign(static_cast<std::size_t>(n) * (layers + 1), 0.0);
        for (std::size_t l = 0; l < layers; ++l) {
            const StateId q = model_->inducer(l);
            for (NodeId j = 0; j < n; ++j) {
                if (states_[j] != q) continue;
                for (auto [i, w] : net.layer(l).out_neighbors(j))
                    rows_[i * (layers + 1) + 1 + l] += w;
            }
        }

        for (NodeId i = 0; i < n; ++i) {
            double& lam = rows_[i * (layers + 1)];
            lam = node_rate(*model_, states_[i], influence_row(i));
            if (lam > 0.0) table_.push(i, rng_.exponential(lam));
        }
    }

    StateId sample_destination(NodeId node, StateId from) {
        const std::size_t m = model_->state_count();
        double total = 0.0;
        dest_rates_.assign(m, 0.0);
        for (const auto& t : model_->node_transitions(from)) {
            dest_rates_[t.to] += t.rate;
            total += t.rate;
        }
        const auto infl = influence_row(node);
        for (const auto& t : model_->edge_transitions(from)) {
            const double r = t.rate * infl[t.layer];
            dest_rates_[t.to] += r;
            total += r;
        }
        if (!(total > 0.0))
            throw std::logic_error("node " + std::to_string(node) +
                                   " popped with zero total rate");
        const double u = rng_.uniform_open() * total;
        double acc = 0.0;
        for (std::size_t s = 0; s < m; ++s) {
            acc += dest_rates_[s];
            if (u <= acc && dest_rates_[s] > 0.0) return static_cast<StateId>(s);
        }
        for (std::size_t s = m; s-- > 0;)
            if (dest_rates_[s] > 0.0) return static_cast<StateId>(s);
        throw std::logic_error("destination sampling failed");
    }

    // Influence sums are maintained for every out-neighbor on layers whose
    // inducer is involved; constraint 3 gates only the rate update and the
    // queue reschedule, where the rate change would be zero anyway.
    void cautious_update(NodeId node, StateId old_state, StateId new_state) {
        touched_.clear();
        const auto& net = model_->network();
        const std::size_t layers = model_->layer_count();
        for (std::size_t l = 0; l < layers; ++l) {
            const StateId q = model_->inducer(l);
            if (q != old_state && q != new_state) continue;
            const double sign = (q == new_state) ? 1.0 : -1.0;
            for (auto [nb, w] : net.layer(l).out_neighbors(node)) {
                const std::size_t base = static_cast<std::size_t>(nb) * (layers + 1);
                double& cell = rows_[base + 1 + l];
                cell += sign * w;
                cell = clamp_nonnegative(cell, "influence", nb);
                if (!model_->relevant(l, states_[nb])) continue;
                const double delta = sign * w * model_->edge_exit_rate(l, states_[nb]);
                if (delta == 0.0) continue;
                // recompute from the influence row rather than accumulating
                // deltas, so a rate that should reach zero lands exactly on it
                double& lam = rows_[base];
                lam = node_rate(*model_, states_[nb], influence_row(nb));
                if (lam > 0.0) {
                    table_.upsert(nb, t_current_ + rng_.exponential(lam));
                } else if (table_.contains(nb)) {
                    table_.remove(nb);
                }
                touched_.push_back(nb);
            }
        }
    }

    static double clamp_nonnegative(double v, const char* what, NodeId node) {
        if (v >= 0.0) [[likely]] return v;
        return clamp_negative(v, what, node);
    }

    [[gnu::noinline]] static double clamp_negative(double v, const char* what, NodeId node) {
        if (v >= -1e-9) return 0.0;
        throw std::logic_error(std::string(what) + " went negative at node " +
                               std::to_string(node) + ": " + std::to_string(v));
    }

    const CompiledModel* model_;
    Rng rng_;
    EngineMode mode_;
    detail::TimeTable table_;
    std::vector<StateId> states_;
    std::vector<std::uint64_t> counts_;
    // per node, contiguous: [exit rate, influence sum per layer]; one cache
    // line serves both reads when a neighbor is rescheduled
    std::vector<double> rows_;
    std::vector<double> dest_rates_;
    std::vector<NodeId> touched_;
    double t_current_ = 0.0;
    std::uint64_t event_count_ = 0;
};

namespace detail {

inline bool state_count_met(const std::vector<std::uint64_t>& counts, const StopCondition& stop) {
    return stop.kind == StopCondition::Kind::StateCount && counts[stop.state] >= stop.threshold;
}

}  // namespace detail

// Full event loop with stop handling. Events past a max_time horizon are not
// emitted; the final time is then the horizon itself.
inline RunResult run_loop(Simulation& sim, const RunConfig& cfg) {
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
        const auto next = sim.next_event_time();
        if (!next) return finish(StopReason::Absorbed, sim.current_time());
        if (stop.kind == StopCondition::Kind::MaxTime && *next > stop.horizon)
            return finish(StopReason::HorizonReached, stop.horizon);
        const auto event = sim.step();
        result.events.push_back(*event);
        if (cfg.audit_every > 0 && sim.event_count() % cfg.audit_every == 0) sim.audit();
        if (detail::state_count_met(sim.state_counts(), stop))
            return finish(StopReason::StateCountReached, sim.current_time());
    }
}

inline RunResult run(const CompiledModel& model, const RunConfig& cfg) {
    Simulation sim(model, cfg);
    return run_loop(sim, cfg);
}

inline RunResult run(const CompiledModel& model, const RunConfig& cfg, Rng rng) {
    Simulation sim(model, cfg, rng);
    return run_loop(sim, cfg);
}

}  // namespace spreadnet

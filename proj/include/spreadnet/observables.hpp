#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "spreadnet/engine.hpp"

namespace spreadnet {

struct EventLog {
    // header
    NodeId node_count = 0;
    std::vector<std::string> state_names;
    std::uint64_t seed = 0;
    std::uint64_t model_digest = 0;
    // body
    std::vector<StateId> initial_states;
    std::vector<EventRecord> records;
    double final_time = 0.0;

    std::vector<std::uint64_t> initial_counts() const {
        std::vector<std::uint64_t> counts(state_names.size(), 0);
        for (StateId s : initial_states) ++counts.at(s);
        return counts;
    }
};

inline EventLog make_log(const CompiledModel& model, const RunResult& result,
                         std::uint64_t seed) {
    EventLog log;
    log.node_count = model.network().node_count();
    log.state_names = model.schema().state_names;
    log.seed = seed;
    log.model_digest = model.digest();
    log.initial_states = result.initial_states;
    log.records = result.events;
    log.final_time = result.final_time;
    return log;
}

// Replays the record sequence from the initial state, checking every
// from_state against the reconstructed trajectory. Returns the final states.
inline std::vector<StateId> replay(const EventLog& log) {
    std::vector<StateId> states = log.initial_states;
    double prev_time = 0.0;
    for (std::size_t k = 0; k < log.records.size(); ++k) {
        const EventRecord& r = log.records[k];
        if (r.time < prev_time)
            throw std::runtime_error("replay: record " + std::to_string(k) +
                                     " goes backwards in time");
        if (r.node >= states.size() || r.from_state == r.to_state)
            throw std::runtime_error("replay: record " + std::to_string(k) + " is malformed");
        if (states[r.node] != r.from_state)
            throw std::runtime_error("replay: record " + std::to_string(k) +
                                     " from-state mismatch at node " + std::to_string(r.node));
        states[r.node] = r.to_state;
        prev_time = r.time;
    }
    return states;
}

struct TimeSeries {
    std::vector<double> grid;
    // row-major K x M; counts for single runs, mean fractions for ensembles
    std::vector<double> values;
    std::vector<double> stddev;  // empty for single runs
    std::size_t state_count = 0;

    double at(std::size_t row, std::size_t state) const {
        return values[row * state_count + state];
    }
};

inline std::vector<double> uniform_grid(double horizon, std::size_t points) {
    if (points < 2) throw std::invalid_argument("grid needs at least 2 points");
    std::vector<double> grid(points);
    for (std::size_t k = 0; k < points; ++k)
        grid[k] = horizon * static_cast<double>(k) / static_cast<double>(points - 1);
    return grid;
}

// Step-function evaluation of compartment counts at the grid times: each row
// holds the counts after all events with time <= t. Grid points beyond the
// final time are legal only for absorbed runs, where counts are frozen.
inline TimeSeries counts_on_grid(const EventLog& log, const std::vector<double>& grid,
                                 bool absorbed = true) {
    const std::size_t m = log.state_names.size();
    TimeSeries ts;
    ts.grid = grid;
    ts.state_count = m;
    ts.values.reserve(grid.size() * m);

    std::vector<std::uint64_t> counts = log.initial_counts();
    std::vector<StateId> states = log.initial_states;
    std::size_t next = 0;
    double prev = -1.0;
    for (double t : grid) {
        if (t < prev) throw std::invalid_argument("grid must be non-decreasing");
        prev = t;
        if (!absorbed && t > log.final_time)
            throw std::out_of_range("grid point beyond the simulated horizon");
        while (next < log.records.size() && log.records[next].time <= t) {
            const EventRecord& r = log.records[next];
            if (states.at(r.node) != r.from_state)
                throw std::runtime_error("counts_on_grid: from-state mismatch in record " +
                                         std::to_string(next));
            states[r.node] = r.to_state;
            --counts[r.from_state];
            ++counts[r.to_state];
            ++next;
        }
        for (std::size_t s = 0; s < m; ++s) ts.values.push_back(static_cast<double>(counts[s]));
    }
    return ts;
}

// Element-wise mean of per-run fractions (counts / N), with per-state
// standard deviation across runs.
inline TimeSeries ensemble_mean(const std::vector<TimeSeries>& runs, NodeId node_count) {
    if (runs.empty()) throw std::invalid_argument("ensemble_mean: no runs");
    const TimeSeries& first = runs.front();
    for (const auto& r : runs)
        if (r.grid != first.grid || r.state_count != first.state_count)
            throw std::invalid_argument("ensemble_mean: grids or state counts differ");

    const double n = static_cast<double>(node_count);
    const std::size_t cells = first.values.size();
    TimeSeries out;
    out.grid = first.grid;
    out.state_count = first.state_count;
    out.values.assign(cells, 0.0);
    out.stddev.assign(cells, 0.0);
    for (const auto& r : runs)
        for (std::size_t c = 0; c < cells; ++c) out.values[c] += r.values[c] / n;
    const double runs_n = static_cast<double>(runs.size());
    for (std::size_t c = 0; c < cells; ++c) out.values[c] /= runs_n;
    for (const auto& r : runs)
        for (std::size_t c = 0; c < cells; ++c) {
            const double d = r.values[c] / n - out.values[c];
            out.stddev[c] += d * d;
        }
    for (std::size_t c = 0; c < cells; ++c) out.stddev[c] = std::sqrt(out.stddev[c] / runs_n);
    return out;
}

// --- on-disk formats ------------------------------------------------------

namespace detail {

inline std::string fmt_double(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

[[noreturn]] inline void log_parse_error(const std::string& what, std::size_t line) {
    throw std::runtime_error("event log parse error at line " + std::to_string(line) + ": " +
                             what);
}

}  // namespace detail

// CSV with '#'-prefixed metadata header, then one `time,node,from,to` row per
// event. Times carry 17 significant digits, so the round trip is lossless.
inline void write_log(std::ostream& out, const EventLog& log) {
    out << "# spreadnet-event-log v1\n";
    out << "# N=" << log.node_count << '\n';
    out << "# M=" << log.state_names.size() << '\n';
    out << "# states=";
    for (std::size_t s = 0; s < log.state_names.size(); ++s)
        out << (s ? "," : "") << log.state_names[s];
    out << '\n';
    out << "# seed=" << log.seed << '\n';
    out << "# model_digest=" << log.model_digest << '\n';
    out << "# final_time=" << detail::fmt_double(log.final_time) << '\n';
    out << "# x0=";
    for (std::size_t i = 0; i < log.initial_states.size(); ++i)
        out << (i ? "," : "") << static_cast<unsigned>(log.initial_states[i]);
    out << '\n';
    out << "time,node,from,to\n";
    for (const EventRecord& r : log.records)
        out << detail::fmt_double(r.time) << ',' << r.node << ','
            << static_cast<unsigned>(r.from_state) << ',' << static_cast<unsigned>(r.to_state)
            << '\n';
}

inline void write_log(const std::string& path, const EventLog& log) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    write_log(out, log);
}

inline EventLog read_log(std::istream& in) {
    EventLog log;
    std::string line;
    std::size_t line_no = 0;
    bool saw_magic = false, saw_columns = false, saw_final_time = false, saw_x0 = false;

    auto split = [](const std::string& s, char sep) {
        std::vector<std::string> parts;
        std::istringstream ss(s);
        std::string item;
        while (std::getline(ss, item, sep)) parts.push_back(item);
        return parts;
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::string body = line.substr(1);
            if (!body.empty() && body.front() == ' ') body.erase(0, 1);
            if (body.rfind("spreadnet-event-log", 0) == 0) {
                saw_magic = true;
            } else if (const auto eq = body.find('='); eq != std::string::npos) {
                const std::string key = body.substr(0, eq), value = body.substr(eq + 1);
                try {
                    if (key == "N")
                        log.node_count = static_cast<NodeId>(std::stoull(value));
                    else if (key == "states")
                        log.state_names = split(value, ',');
                    else if (key == "seed")
                        log.seed = std::stoull(value);
                    else if (key == "model_digest")
                        log.model_digest = std::stoull(value);
                    else if (key == "final_time") {
                        log.final_time = std::stod(value);
                        saw_final_time = true;
                    } else if (key == "x0") {
                        for (const auto& tok : split(value, ','))
                            log.initial_states.push_back(static_cast<StateId>(std::stoul(tok)));
                        saw_x0 = true;
                    }
                } catch (const std::exception&) {
                    detail::log_parse_error("bad value for key \"" + key + "\"", line_no);
                }
            }
            continue;
        }
        if (!saw_columns) {
            if (line != "time,node,from,to")
                detail::log_parse_error("expected column header \"time,node,from,to\"", line_no);
            saw_columns = true;
            continue;
        }
        const auto fields = split(line, ',');
        if (fields.size() != 4) detail::log_parse_error("expected 4 fields", line_no);
        EventRecord r;
        try {
            r.time = std::stod(fields[0]);
            r.node = static_cast<NodeId>(std::stoull(fields[1]));
            r.from_state = static_cast<StateId>(std::stoul(fields[2]));
            r.to_state = static_cast<StateId>(std::stoul(fields[3]));
        } catch (const std::exception&) {
            detail::log_parse_error("malformed record", line_no);
        }
        log.records.push_back(r);
    }
    if (!saw_magic) throw std::runtime_error("event log parse error: missing format line");
    if (!saw_columns || !saw_final_time || !saw_x0)
        throw std::runtime_error("event log parse error: truncated header");
    if (log.initial_states.size() != log.node_count)
        throw std::runtime_error("event log parse error: x0 length does not match N");
    if (log.state_names.empty())
        throw std::runtime_error("event log parse error: missing states");
    return log;
}

inline EventLog read_log(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open event log: " + path);
    try {
        return read_log(in);
    } catch (const std::runtime_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

// `t,count_state0,...` plus `,std_state0,...` columns when dispersion exists.
inline void write_time_series(std::ostream& out, const TimeSeries& ts,
                              const std::vector<std::string>& state_names) {
    out << "t";
    for (const auto& name : state_names) out << ",count_" << name;
    if (!ts.stddev.empty())
        for (const auto& name : state_names) out << ",std_" << name;
    out << '\n';
    for (std::size_t k = 0; k < ts.grid.size(); ++k) {
        out << detail::fmt_double(ts.grid[k]);
        for (std::size_t s = 0; s < ts.state_count; ++s)
            out << ',' << detail::fmt_double(ts.at(k, s));
        if (!ts.stddev.empty())
            for (std::size_t s = 0; s < ts.state_count; ++s)
                out << ',' << detail::fmt_double(ts.stddev[k * ts.state_count + s]);
        out << '\n';
    }
}

}  // namespace spreadnet

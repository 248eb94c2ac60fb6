// Command-line driver: network generation, simulation ensembles, log
// averaging, and the scaling benchmark harness.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spreadnet/model_io.hpp"
#include "spreadnet/spreadnet.hpp"

namespace fs = std::filesystem;
using namespace spreadnet;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::istringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) parts.push_back(item);
    return parts;
}

StopCondition parse_stop(const std::string& spec, const ModelSchema& schema) {
    if (spec == "absorption") return StopCondition::absorption();
    const auto eq = spec.find('=');
    if (eq != std::string::npos) {
        const std::string key = spec.substr(0, eq), value = spec.substr(eq + 1);
        if (key == "time") return StopCondition::max_time(std::stod(value));
        if (key == "events") return StopCondition::max_events(std::stoull(value));
        if (key == "count") {
            const auto colon = value.find(':');
            if (colon != std::string::npos) {
                const int s = schema.state_index(value.substr(0, colon));
                if (s < 0) throw CLI::ValidationError("--stop: unknown state in count spec");
                return StopCondition::state_count(static_cast<StateId>(s),
                                                  std::stoull(value.substr(colon + 1)));
            }
        }
    }
    throw CLI::ValidationError(
        "--stop must be absorption, time=T, events=K, or count=STATE:K");
}

// "I=1,S=*": explicit per-state counts, '*' takes the remainder.
InitialCondition parse_init(const std::string& spec, const ModelSchema& schema, NodeId n) {
    std::vector<std::uint64_t> counts(schema.state_count(), 0);
    int star_state = -1;
    std::uint64_t assigned = 0;
    for (const auto& part : split(spec, ',')) {
        const auto eq = part.find('=');
        if (eq == std::string::npos)
            throw CLI::ValidationError("--init entries must look like STATE=COUNT");
        const int s = schema.state_index(part.substr(0, eq));
        if (s < 0) throw CLI::ValidationError("--init: unknown state \"" + part.substr(0, eq) + "\"");
        const std::string value = part.substr(eq + 1);
        if (value == "*") {
            if (star_state >= 0) throw CLI::ValidationError("--init: only one '*' allowed");
            star_state = s;
        } else {
            counts[s] += std::stoull(value);
            assigned += std::stoull(value);
        }
    }
    if (star_state >= 0) {
        if (assigned > n) throw CLI::ValidationError("--init: counts exceed node count");
        counts[star_state] += n - assigned;
    }
    return InitialCondition::from_counts(std::move(counts));
}

InitialCondition load_init_file(const std::string& path, const ModelSchema& schema) {
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("cannot open --init-file " + path);
    std::vector<StateId> states;
    std::string token;
    while (in >> token) {
        const int s = schema.state_index(token);
        if (s < 0) throw CLI::ValidationError("--init-file: unknown state \"" + token + "\"");
        states.push_back(static_cast<StateId>(s));
    }
    return InitialCondition::from_states(std::move(states));
}

EngineMode parse_mode(const std::string& s) {
    if (s == "sparse") return EngineMode::Sparse;
    if (s == "dense") return EngineMode::Dense;
    if (s == "auto") return EngineMode::Auto;
    throw CLI::ValidationError("--mode must be sparse, dense, or auto");
}

void write_layer(const LayerGraph& g, const std::string& out) {
    if (out.empty() || out == "-") {
        write_edge_list(std::cout, g);
    } else {
        std::ofstream f(out, std::ios::binary);
        if (!f) throw CLI::ValidationError("cannot open output file " + out);
        write_edge_list(f, g);
    }
}

struct BenchRow {
    std::string param;
    double mean_event_time = 0.0;
    double std_event_time = 0.0;
    std::uint64_t events = 0;
};

// Mean per-event wall time over `trials` runs, initialization excluded.
BenchRow bench_instance(const CompiledModel& model, const RunConfig& cfg, EngineKind engine,
                        unsigned trials, std::uint64_t event_cap) {
    std::vector<double> per_event;
    std::uint64_t total_events = 0;
    for (unsigned t = 0; t < trials; ++t) {
        const Rng stream = Rng::for_run(cfg.seed, t);
        std::uint64_t events = 0;
        double seconds = 0.0;
        if (engine == EngineKind::Oracle) {
            OracleSimulation sim(model, cfg, stream);
            const auto start = std::chrono::steady_clock::now();
            while (events < event_cap && sim.step()) ++events;
            seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                          .count();
        } else {
            Simulation sim(model, cfg, stream);
            const auto start = std::chrono::steady_clock::now();
            while (events < event_cap && sim.step()) ++events;
            seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                          .count();
        }
        if (events > 0) per_event.push_back(seconds / static_cast<double>(events));
        total_events += events;
    }
    BenchRow row;
    row.events = total_events;
    if (!per_event.empty()) {
        row.mean_event_time =
            std::accumulate(per_event.begin(), per_event.end(), 0.0) / per_event.size();
        double var = 0.0;
        for (double v : per_event) var += (v - row.mean_event_time) * (v - row.mean_event_time);
        row.std_event_time = std::sqrt(var / per_event.size());
    }
    return row;
}

int cmd_generate(const std::string& kind, NodeId n, double p, double radius, double target_degree,
                 NodeId m, NodeId k, double p_rewire, std::uint64_t seed,
                 const std::string& out) {
    LayerGraph g;
    if (kind == "er") {
        g = generate_erdos_renyi(n, p, seed);
    } else if (kind == "geometric") {
        double r = radius;
        if (r <= 0.0) {
            if (target_degree <= 0.0)
                throw CLI::ValidationError("geometric needs --radius or --target-degree");
            r = geometric_radius_for_degree(n, target_degree);
        }
        g = generate_geometric(n, r, seed);
    } else if (kind == "ba") {
        g = generate_barabasi_albert(n, m, seed);
    } else if (kind == "ws") {
        g = generate_watts_strogatz(n, k, p_rewire, seed);
    } else if (kind == "complete") {
        g = generate_complete(n);
    } else {
        throw CLI::ValidationError("unknown generator kind " + kind);
    }
    write_layer(g, out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Event-driven exact simulator for multilayer spreading processes"};
    app.require_subcommand(1);

    // --- generate ---------------------------------------------------------
    auto* gen = app.add_subcommand("generate", "Write a synthetic network as an edge list");
    gen->require_subcommand(1);
    NodeId gen_n = 100, gen_m = 2, gen_k = 4;
    double gen_p = 0.1, gen_radius = 0.0, gen_target_degree = 0.0, gen_p_rewire = 0.1;
    std::uint64_t gen_seed = 1;
    std::string gen_out = "-";
    for (const char* kind : {"er", "geometric", "ba", "ws", "complete"}) {
        auto* sub = gen->add_subcommand(kind);
        sub->add_option("--n", gen_n, "node count")->required();
        sub->add_option("--seed", gen_seed, "generator seed");
        sub->add_option("--out", gen_out, "output path, '-' for stdout");
        if (std::string(kind) == "er") sub->add_option("--p", gen_p, "edge probability");
        if (std::string(kind) == "geometric") {
            sub->add_option("--radius", gen_radius, "connection radius");
            sub->add_option("--target-degree", gen_target_degree, "solve radius for this degree");
        }
        if (std::string(kind) == "ba") sub->add_option("--m", gen_m, "edges per new node");
        if (std::string(kind) == "ws") {
            sub->add_option("--k", gen_k, "ring neighbors (even)");
            sub->add_option("--p-rewire", gen_p_rewire, "rewiring probability");
        }
    }

    // --- run --------------------------------------------------------------
    auto* run_cmd = app.add_subcommand("run", "Execute a simulation ensemble");
    std::string run_model, run_stop = "absorption", run_init, run_init_file, run_out = "out";
    std::string run_engine = "fast", run_mode = "auto";
    std::uint64_t run_seed = 1, run_audit = 0;
    std::size_t run_count = 1;
    unsigned run_jobs = 1;
    run_cmd->add_option("--model", run_model, "model config file")->required();
    run_cmd->add_option("--seed", run_seed, "master seed");
    run_cmd->add_option("--runs", run_count, "ensemble size");
    run_cmd->add_option("--engine", run_engine, "fast | oracle");
    run_cmd->add_option("--mode", run_mode, "sparse | dense | auto");
    run_cmd->add_option("--stop", run_stop, "absorption | time=T | events=K | count=STATE:K");
    run_cmd->add_option("--init", run_init, "per-state counts, e.g. I=1,S=*");
    run_cmd->add_option("--init-file", run_init_file, "per-node states, one per line");
    run_cmd->add_option("--out", run_out, "output directory");
    run_cmd->add_option("--jobs", run_jobs, "worker threads");
    run_cmd->add_option("--audit-every", run_audit, "debug audit period (0 = off)");

    // --- average ----------------------------------------------------------
    auto* avg = app.add_subcommand("average", "Ensemble-average a directory of event logs");
    std::string avg_dir, avg_out = "-";
    std::size_t avg_grid = 101;
    double avg_horizon = 0.0;
    avg->add_option("--dir", avg_dir, "directory of event logs")->required();
    avg->add_option("--grid", avg_grid, "number of grid points");
    avg->add_option("--horizon", avg_horizon, "grid end time (default: max final time)");
    avg->add_option("--out", avg_out, "output CSV, '-' for stdout");

    // --- bench ------------------------------------------------------------
    auto* bench = app.add_subcommand("bench", "Per-event wall-time scaling sweeps");
    std::string bench_scaling = "nodes", bench_out = "-", bench_engine = "fast";
    std::vector<std::string> bench_range;
    unsigned bench_trials = 3;
    std::uint64_t bench_seed = 1, bench_cap = 200000;
    bool bench_weighted = false;
    NodeId bench_n = 5000;
    bench->add_option("--scaling", bench_scaling, "nodes | edges | layers")->required();
    bench->add_option("--range", bench_range, "sweep values (sizes, degrees, or layer counts)");
    bench->add_option("--trials", bench_trials, "trials per point");
    bench->add_option("--seed", bench_seed, "master seed");
    bench->add_option("--events", bench_cap, "event cap per trial");
    bench->add_option("--n", bench_n, "node count (edges/layers sweeps)");
    bench->add_option("--engine", bench_engine, "fast | oracle");
    bench->add_flag("--weighted", bench_weighted, "random edge weights (layers sweep)");
    bench->add_option("--out", bench_out, "output CSV, '-' for stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            const std::string kind = gen->get_subcommands().front()->get_name();
            return cmd_generate(kind, gen_n, gen_p, gen_radius, gen_target_degree, gen_m, gen_k,
                                gen_p_rewire, gen_seed, gen_out);
        }

        if (run_cmd->parsed()) {
            const ModelConfig mc = load_model_config(run_model);
            const MultilayerNetwork net = load_network(mc);
            const CompiledModel model(mc.schema, net);

            RunConfig cfg;
            cfg.seed = run_seed;
            cfg.mode = parse_mode(run_mode);
            cfg.stop = parse_stop(run_stop, mc.schema);
            cfg.audit_every = run_audit;
            if (!run_init_file.empty())
                cfg.init = load_init_file(run_init_file, mc.schema);
            else if (!run_init.empty())
                cfg.init = parse_init(run_init, mc.schema, net.node_count());
            else
                throw CLI::ValidationError("run needs --init or --init-file");

            const EngineKind engine =
                run_engine == "oracle" ? EngineKind::Oracle : EngineKind::Fast;
            if (run_engine != "oracle" && run_engine != "fast")
                throw CLI::ValidationError("--engine must be fast or oracle");

            fs::create_directories(run_out);
            const auto start = std::chrono::steady_clock::now();
            const auto results = run_ensemble(model, cfg, engine, run_count, run_jobs);
            const double wall =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

            std::uint64_t total_events = 0;
            std::ofstream summary(fs::path(run_out) / "summary.csv");
            summary << "run,seed,events,final_time,reason";
            for (const auto& s : mc.schema.state_names) summary << ",count_" << s;
            summary << '\n';
            for (std::size_t r = 0; r < results.size(); ++r) {
                const RunResult& res = results[r];
                std::ostringstream name;
                name << "run_" << std::setw(4) << std::setfill('0') << r << ".csv";
                write_log((fs::path(run_out) / name.str()).string(),
                          make_log(model, res, cfg.seed));
                total_events += res.events.size();
                static const char* reasons[] = {"absorbed", "horizon", "max_events",
                                                "state_count"};
                summary << r << ',' << cfg.seed << ',' << res.events.size() << ','
                        << std::setprecision(17) << res.final_time << ','
                        << reasons[static_cast<int>(res.reason)];
                std::vector<std::uint64_t> counts(mc.schema.state_count(), 0);
                for (StateId s : res.final_states) ++counts[s];
                for (auto c : counts) summary << ',' << c;
                summary << '\n';
            }
            std::cerr << run_count << " run(s), " << total_events << " events in " << wall
                      << "s (" << (wall > 0 ? total_events / wall : 0.0) << " events/s)\n";
            return 0;
        }

        if (avg->parsed()) {
            std::vector<EventLog> logs;
            std::vector<fs::path> files;
            for (const auto& entry : fs::directory_iterator(avg_dir)) {
                const auto name = entry.path().filename().string();
                if (entry.is_regular_file() && name.rfind("run_", 0) == 0 &&
                    entry.path().extension() == ".csv")
                    files.push_back(entry.path());
            }
            std::sort(files.begin(), files.end());
            for (const auto& f : files) logs.push_back(read_log(f.string()));
            if (logs.empty()) throw CLI::ValidationError("no run_*.csv logs in " + avg_dir);

            double horizon = avg_horizon;
            if (horizon <= 0.0)
                for (const auto& log : logs) horizon = std::max(horizon, log.final_time);
            const auto grid = uniform_grid(horizon, avg_grid);
            std::vector<TimeSeries> series;
            series.reserve(logs.size());
            for (const auto& log : logs) series.push_back(counts_on_grid(log, grid));
            const TimeSeries mean = ensemble_mean(series, logs.front().node_count);

            if (avg_out.empty() || avg_out == "-") {
                write_time_series(std::cout, mean, logs.front().state_names);
            } else {
                std::ofstream f(avg_out, std::ios::binary);
                if (!f) throw CLI::ValidationError("cannot open output file " + avg_out);
                write_time_series(f, mean, logs.front().state_names);
            }
            return 0;
        }

        if (bench->parsed()) {
            const EngineKind engine =
                bench_engine == "oracle" ? EngineKind::Oracle : EngineKind::Fast;
            std::vector<BenchRow> rows;
            auto run_point = [&](const std::string& label, const CompiledModel& model,
                                 const RunConfig& cfg) {
                BenchRow row = bench_instance(model, cfg, engine, bench_trials, bench_cap);
                row.param = label;
                rows.push_back(row);
            };

            if (bench_scaling == "nodes") {
                std::vector<std::string> sizes =
                    bench_range.empty() ? std::vector<std::string>{"100", "1000", "10000", "100000"}
                                        : bench_range;
                for (const auto& s : sizes) {
                    const NodeId n = static_cast<NodeId>(std::stoull(s));
                    MultilayerNetwork net({generate_geometric(
                        n, geometric_radius_for_degree(n, 11.0), bench_seed)});
                    CompiledModel model(preset_sir(0.005, 0.01), net);
                    RunConfig cfg;
                    cfg.seed = bench_seed;
                    cfg.mode = EngineMode::Sparse;
                    std::vector<std::uint64_t> counts(3, 0);
                    counts[1] = std::max<std::uint64_t>(1, n / 100);
                    counts[0] = n - counts[1];
                    cfg.init = InitialCondition::from_counts(counts);
                    run_point(s, model, cfg);
                }
            } else if (bench_scaling == "edges") {
                std::vector<std::string> degrees =
                    bench_range.empty() ? std::vector<std::string>{"10", "100", "1000", "4999"}
                                        : bench_range;
                for (const auto& d : degrees) {
                    const double degree = std::stod(d);
                    const double p = degree / static_cast<double>(bench_n - 1);
                    MultilayerNetwork net(
                        {generate_erdos_renyi(bench_n, std::min(1.0, p), bench_seed)});
                    CompiledModel model(preset_sir(0.005, 0.01), net);
                    RunConfig cfg;
                    cfg.seed = bench_seed;
                    cfg.mode = EngineMode::Auto;
                    std::vector<std::uint64_t> counts(3, 0);
                    counts[1] = std::max<std::uint64_t>(1, bench_n / 100);
                    counts[0] = bench_n - counts[1];
                    cfg.init = InitialCondition::from_counts(counts);
                    run_point(d, model, cfg);
                }
            } else if (bench_scaling == "layers") {
                std::vector<std::string> layer_counts =
                    bench_range.empty() ? std::vector<std::string>{"1", "4", "16"} : bench_range;
                const LayerGraph base = generate_geometric(
                    bench_n, geometric_radius_for_degree(bench_n, 11.0), bench_seed);
                for (const auto& lc : layer_counts) {
                    const std::size_t layers = std::stoull(lc);
                    LayerGraph layer = base;
                    if (bench_weighted) {
                        Rng wrng(bench_seed + 17);
                        auto arcs = base.to_arcs();
                        for (auto& a : arcs)
                            if (a.src < a.dst) a.weight = 0.5 + wrng.uniform();
                        // mirror weights onto the reverse arcs
                        std::vector<Arc> sym;
                        for (const auto& a : arcs)
                            if (a.src < a.dst) {
                                sym.push_back(a);
                                sym.push_back({a.dst, a.src, a.weight});
                            }
                        layer = LayerGraph::from_arcs(base.node_count(), std::move(sym));
                    }
                    MultilayerNetwork net(std::vector<LayerGraph>(layers, layer));
                    CompiledModel model(
                        preset_competitive_sis(layers, std::vector<double>(layers, 0.5), 0.5),
                        net);
                    RunConfig cfg;
                    cfg.seed = bench_seed;
                    cfg.mode = EngineMode::Sparse;
                    std::vector<std::uint64_t> counts(layers + 1, 0);
                    const std::uint64_t per_layer = std::max<std::uint64_t>(1, bench_n / 100);
                    for (std::size_t k = 1; k <= layers; ++k) counts[k] = per_layer;
                    counts[0] = bench_n - per_layer * layers;
                    cfg.init = InitialCondition::from_counts(counts);
                    run_point(lc, model, cfg);
                }
            } else {
                throw CLI::ValidationError("--scaling must be nodes, edges, or layers");
            }

            std::ostringstream table;
            table << "param,mean_event_time_s,std,events\n";
            for (const auto& row : rows)
                table << row.param << ',' << row.mean_event_time << ',' << row.std_event_time
                      << ',' << row.events << '\n';
            if (bench_out.empty() || bench_out == "-") {
                std::cout << table.str();
            } else {
                std::ofstream f(bench_out, std::ios::binary);
                if (!f) throw CLI::ValidationError("cannot open output file " + bench_out);
                f << table.str();
            }
            return 0;
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

#include "spreadnet/engine.hpp"
#include "spreadnet/oracle.hpp"

namespace spreadnet {

// Dispatches `count` independent run indices to a pool of workers. Each run
// owns its result slot, so the only shared state is the index counter and the
// first-error capture.
inline void parallel_runs(std::size_t count, unsigned jobs,
                          const std::function<void(std::size_t)>& body) {
    if (jobs <= 1 || count <= 1) {
        for (std::size_t r = 0; r < count; ++r) body(r);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    auto worker = [&] {
        for (;;) {
            const std::size_t r = next.fetch_add(1);
            if (r >= count) return;
            try {
                body(r);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

enum class EngineKind { Fast, Oracle };

inline RunResult run_one(const CompiledModel& model, const RunConfig& cfg, EngineKind engine,
                         std::size_t run_index) {
    const Rng stream = Rng::for_run(cfg.seed, run_index);
    return engine == EngineKind::Oracle ? oracle_run(model, cfg, stream)
                                        : run(model, cfg, stream);
}

// Runs an ensemble; run r draws from the stream derived from (cfg.seed, r).
inline std::vector<RunResult> run_ensemble(const CompiledModel& model, const RunConfig& cfg,
                                           EngineKind engine, std::size_t runs,
                                           unsigned jobs = 1) {
    std::vector<RunResult> results(runs);
    parallel_runs(runs, jobs,
                  [&](std::size_t r) { results[r] = run_one(model, cfg, engine, r); });
    return results;
}

}  // namespace spreadnet

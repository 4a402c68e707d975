#include "handover/simulation.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "handover/errors.hpp"

namespace handover {

std::size_t default_threads() {
    if (const char* env = std::getenv("HANDOVER_LAB_THREADS")) {
        try {
            const long n = std::stol(env);
            if (n > 0) return static_cast<std::size_t>(n);
        } catch (const std::exception&) {
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

void parallel_for(std::size_t n, std::size_t threads,
                  const std::function<void(std::size_t)>& body) {
    if (threads == 0) threads = default_threads();
    threads = std::min(threads, n);
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

ReplicaOutput simulate_replica(const ScenarioConfig& config, std::uint64_t replica) {
    config.validate();
    ReplicaOutput out;
    out.replica = replica;
    HeadWindow window = size_window(config);
    for (int attempt = 0; attempt <= 3; ++attempt) {
        Rng rng = Rng(config.seed).split(replica).split(static_cast<std::uint64_t>(attempt));
        out.real = sample_heads(config, window, rng);
        out.segments = lower_envelope(out.real);
        if (!out.real.overflow_flag) {
            out.events = extract_handovers(out.segments, out.real);
            out.retries = attempt;
            return out;
        }
        window = window_with_cap(config, 2.0 * window.h_max);
    }
    throw Overflow("envelope exceeded the height cap after 3 retries");
}

std::vector<ReplicaOutput> simulate_replicas(const ScenarioConfig& config, std::size_t replicas,
                                             std::size_t threads) {
    std::vector<ReplicaOutput> out(replicas);
    parallel_for(replicas, threads, [&](std::size_t i) { out[i] = simulate_replica(config, i); });
    return out;
}

} // namespace handover

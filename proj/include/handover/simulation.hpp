#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "handover/envelope.hpp"
#include "handover/point_processes.hpp"

namespace handover {

struct ReplicaOutput {
    std::uint64_t replica = 0;
    Realization real;
    std::vector<EnvelopeSegment> segments;
    std::vector<HandoverEvent> events;
    int retries = 0;
};

// One replica with its own child stream hash(seed, replica). On overflow
// the height cap is doubled, at most three times, then Overflow is thrown.
ReplicaOutput simulate_replica(const ScenarioConfig& config, std::uint64_t replica);

std::vector<ReplicaOutput> simulate_replicas(const ScenarioConfig& config, std::size_t replicas,
                                             std::size_t threads = 0);

// Runs body(i) for i in [0, n) on a small pool of std::threads.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& body);

// Thread count from HANDOVER_LAB_THREADS, else hardware concurrency.
std::size_t default_threads();

} // namespace handover

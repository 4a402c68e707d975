#pragma once

#include <limits>
#include <string>
#include <vector>

#include "handover/analytics.hpp"
#include "handover/envelope.hpp"
#include "handover/simulation.hpp"
#include "handover/stats.hpp"

namespace handover {

struct PalmSampleSet {
    std::vector<HandoverType> type_list;  // index -> type
    std::vector<double> handover_distances;
    std::vector<int> event_types;         // index into type_list, aligned with distances
    std::vector<double> dwell_times;
    std::vector<int> dwell_types;         // type of the event that starts each dwell
    std::vector<double> visible_heights;
    std::vector<double> typical_distances;
    std::vector<std::vector<std::size_t>> transition_counts;
    std::size_t replicas = 0;
    double interior_time = 0.0;
    std::vector<std::size_t> replica_events;
    std::vector<std::size_t> replica_visible;
    std::vector<double> replica_time;
    std::vector<std::vector<std::size_t>> replica_type_counts;
    std::vector<SpeedClass> classes;
};

// Pure types first, then q = 1 mixed pairs, then q = 2 mixed pairs. For two
// classes this is the order 11/1, 22/1, 12/1, 21/1, 12/2, 21/2.
std::vector<HandoverType> enumerate_types(int n_classes);
int type_index(const std::vector<HandoverType>& list, const HandoverType& type);

// Typical-time samples are taken on an evenly spaced grid with a random
// phase, `typical_spacing` apart (0 picks 4 / (v_min sqrt(lambda))).
PalmSampleSet collect(const std::vector<ReplicaOutput>& replicas, double typical_spacing = 0.0);

struct Estimate {
    std::string name;
    double value = 0.0;
    double se = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    double analytic = std::numeric_limits<double>::quiet_NaN();
    std::size_t count = 0;
};

struct EstimateReport {
    std::vector<Estimate> estimates;
    std::vector<stats::TestResult> tests;
    const Estimate* find(const std::string& name) const;
    const stats::TestResult* find_test(const std::string& name) const;
};

// Frequency of the given type, from the class list.
double analytic_type_frequency(const HandoverType& type, const std::vector<SpeedClass>& classes);

EstimateReport estimate_rates(const PalmSampleSet& set, double total_time);

EstimateReport gof_tests(const PalmSampleSet& set, double lambda);

std::vector<McResult> empirical_laplace(const std::vector<double>& samples,
                                        const std::vector<double>& rho_grid);

struct InterferenceReport {
    std::vector<double> radii;
    std::vector<double> observed;
    std::vector<double> expected;
    std::size_t events_used = 0;
    stats::TestResult test;
};

// Counts of other stations at distance in [h, r) at every `stride`-th
// interior handover, binned on the radii grid. Thinning by event index keeps
// each used event Palm-typical; thinning by elapsed time would not.
InterferenceReport interference_check(const std::vector<ReplicaOutput>& replicas,
                                      const std::vector<double>& radii, std::size_t stride);

struct TransitionReport {
    std::vector<std::vector<std::size_t>> counts;
    std::vector<std::vector<int>> table;  // 1 allowed, 0 forbidden
    bool forbidden_absent = false;
    bool allowed_present = false;
    std::size_t pairs = 0;
};

// Allowed two-speed transitions, rows and columns in the order of
// two_speed_type_index.
std::vector<std::vector<int>> two_speed_transition_table();

TransitionReport transition_support(const PalmSampleSet& set);

// Nearest distance at time t from the envelope segments.
double envelope_height(const std::vector<EnvelopeSegment>& segments, const ScenarioConfig& config,
                       double t);

} // namespace handover

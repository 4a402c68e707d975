#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "handover/envelope.hpp"
#include "handover/errors.hpp"
#include "handover/geometry.hpp"
#include "handover/palm.hpp"
#include "handover/point_processes.hpp"
#include "handover/simulation.hpp"

using namespace handover;

namespace {

double brute_min(const Realization& real, double t) {
    const auto speed = class_speed_table(real.config);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : real.heads)
        best = std::min(best, bird_height({p, speed[static_cast<std::size_t>(p.cls)]}, t));
    return best;
}

ScenarioConfig two_speed(double t_end, std::uint64_t seed) {
    ScenarioConfig c;
    c.classes = {{1, 2.0, 0.5}, {2, 1.0, 0.5}};
    c.t_start = 0.0;
    c.t_end = t_end;
    c.seed = seed;
    return c;
}

void check_against_grid(const ReplicaOutput& rep) {
    const auto& cfg = rep.real.config;
    ASSERT_FALSE(rep.segments.empty());
    EXPECT_NEAR(rep.segments.front().t_from, cfg.t_start, 1e-12);
    EXPECT_NEAR(rep.segments.back().t_to, cfg.t_end, 1e-12);
    for (std::size_t i = 1; i < rep.segments.size(); ++i)
        EXPECT_NEAR(rep.segments[i].t_from, rep.segments[i - 1].t_to, 1e-12);
    const int n = 5000;
    for (int i = 0; i <= n; ++i) {
        const double t = cfg.t_start + (cfg.t_end - cfg.t_start) * i / n;
        EXPECT_NEAR(envelope_height(rep.segments, cfg, t), brute_min(rep.real, t), 1e-9) << t;
    }
}

} // namespace

TEST(Envelope, SingleSpeedMatchesDenseGrid) {
    const auto cfg = single_speed_config(1.0, 1.0, 0.0, 40.0, 41);
    for (std::uint64_t r = 0; r < 5; ++r) check_against_grid(simulate_replica(cfg, r));
}

TEST(Envelope, TwoSpeedMatchesDenseGrid) {
    const auto cfg = two_speed(40.0, 42);
    for (std::uint64_t r = 0; r < 5; ++r) check_against_grid(simulate_replica(cfg, r));
}

TEST(Envelope, LinesAndSweepAgree) {
    const auto cfg = single_speed_config(1.0, 1.5, 0.0, 30.0, 43);
    auto rep = simulate_replica(cfg, 0);
    const auto a = lower_envelope_lines(rep.real.heads, 1.5, 0.0, 30.0);
    const auto b = lower_envelope_sweep(rep.real.heads, class_speed_table(cfg), 0.0, 30.0,
                                        std::numeric_limits<double>::infinity());
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_NEAR(a[i].t_from, b[i].t_from, 1e-9);
        EXPECT_EQ(a[i].serving.t, b[i].serving.t);
    }
}

TEST(Envelope, EmptyHeadsThrow) {
    EXPECT_THROW(lower_envelope_lines({}, 1.0, 0.0, 1.0), EmptyRealization);
}

// No head lies strictly inside the half-ellipse of any handover point.
TEST(Envelope, VoidRegionsAreEmpty) {
    const auto cfg = two_speed(60.0, 44);
    const auto rep = simulate_replica(cfg, 0);
    const auto speed = class_speed_table(cfg);
    ASSERT_GT(rep.events.size(), 10u);
    for (const auto& ev : rep.events) {
        for (const auto& p : rep.real.heads) {
            const double d = bird_height({p, speed[static_cast<std::size_t>(p.cls)]}, ev.s);
            EXPECT_GE(d, ev.h * (1.0 - 1e-9));
        }
        // Both serving stations are at distance h at the handover.
        EXPECT_NEAR(bird_height({ev.prev_head, speed[ev.prev_head.cls]}, ev.s), ev.h, 1e-9);
        EXPECT_NEAR(bird_height({ev.next_head, speed[ev.next_head.cls]}, ev.s), ev.h, 1e-9);
    }
}

TEST(Envelope, EventTypesFollowHeads) {
    const auto rep = simulate_replica(two_speed(60.0, 45), 0);
    for (const auto& ev : rep.events) {
        EXPECT_EQ(ev.type, classify(ev.prev_head, ev.next_head));
        EXPECT_GE(two_speed_type_index(ev.type), 0);
        // A slower station never takes over to the left of a faster one.
        if (ev.type.q == 2) EXPECT_NE(ev.type.tau_p, ev.type.tau_n);
    }
}

TEST(Envelope, ClassifyAndOldNotation) {
    const HeadPoint a{0.0, 1.0, 1}, b{1.0, 0.5, 2};
    EXPECT_EQ(classify(a, b), (HandoverType{1, 1, 2}));
    EXPECT_EQ(classify(b, a), (HandoverType{2, 2, 1}));
    EXPECT_EQ(classify(a, HeadPoint{0.0, 0.5, 1}), (HandoverType{1, 1, 1}));

    auto old = to_old_notation({1, 2, 1});
    EXPECT_EQ(old.k, 1);
    EXPECT_EQ(old.l, 2);
    EXPECT_EQ(old.r, 1);
    old = to_old_notation({2, 1, 2});
    EXPECT_EQ(old.k, 2);
    EXPECT_EQ(old.l, 2);
    EXPECT_EQ(old.r, 1);
    old = to_old_notation({1, 1, 2});
    EXPECT_EQ(old.k, 2);
    EXPECT_EQ(old.l, 1);
    EXPECT_EQ(old.r, 2);
    EXPECT_EQ(type_label({2, 2, 1}), "[2;2,1]");
    for (int i = 0; i < two_speed_type_count; ++i) EXPECT_EQ(two_speed_type_index(two_speed_type(i)), i);
}

TEST(Envelope, VisibleHeadsAreServedAtTheirApex) {
    const auto rep = simulate_replica(single_speed_config(1.0, 1.0, 0.0, 50.0, 46), 0);
    for (const auto& hd : visible_heads(rep.segments)) {
        EXPECT_NEAR(envelope_height(rep.segments, rep.real.config, hd.t), hd.h, 1e-12);
    }
}

TEST(Envelope, DistancesAtIsSorted) {
    const auto rep = simulate_replica(single_speed_config(1.0, 1.0, 0.0, 10.0, 47), 0);
    const auto d = distances_at(5.0, rep.real);
    ASSERT_EQ(d.size(), rep.real.heads.size());
    EXPECT_TRUE(std::is_sorted(d.begin(), d.end()));
    EXPECT_NEAR(d.front(), envelope_height(rep.segments, rep.real.config, 5.0), 1e-12);
}

TEST(Envelope, ReplicasAreDeterministicAcrossThreads) {
    const auto cfg = two_speed(30.0, 48);
    const auto a = simulate_replicas(cfg, 4, 1);
    const auto b = simulate_replicas(cfg, 4, 3);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        ASSERT_EQ(a[i].events.size(), b[i].events.size());
        for (std::size_t k = 0; k < a[i].events.size(); ++k) EXPECT_EQ(a[i].events[k].s, b[i].events[k].s);
    }
}

#include <gtest/gtest.h>

#include <cmath>

#include "handover/errors.hpp"
#include "handover/markov.hpp"
#include "handover/palm.hpp"
#include "handover/stats.hpp"

using namespace handover;

namespace {

constexpr double pi = 3.14159265358979323846;

ScenarioConfig two_speed_config(std::uint64_t seed) {
    ScenarioConfig c;
    c.classes = {{1, 2.0, 0.5}, {2, 1.0, 0.5}};
    c.t_start = 0.0;
    c.t_end = 100.0;
    c.seed = seed;
    return c;
}

} // namespace

TEST(Markov, StateGeometryOfSymmetricPair) {
    const MarkovState s{1.0, 2.0, 1.0, std::nullopt};
    const auto g = state_geometry(s, {{1, 1.0, 1.0}});
    EXPECT_NEAR(g.s, 1.0, 1e-12);
    EXPECT_NEAR(g.h, std::sqrt(2.0), 1e-12);
    EXPECT_THROW(state_geometry({-1.0, 1.0, 1.0, std::nullopt}, {{1, 1.0, 1.0}}), DomainError);
}

TEST(Markov, NextLeftHeightIsPreviousRight) {
    Rng rng(61);
    MarkovState s{0.4, 0.9, 0.6, std::nullopt};
    for (int i = 0; i < 500; ++i) {
        const auto r = step_single(s, 1.0, 1.0, rng);
        EXPECT_DOUBLE_EQ(r.state.h_l, s.h_r);
        EXPECT_GT(r.dwell, 0.0);
        EXPECT_GT(r.state.t_r, 0.0);
        s = r.state;
    }
}

TEST(Markov, StepDependsOnlyOnStateAndStream) {
    const MarkovState s{0.4, 0.9, 0.6, std::nullopt};
    Rng a(62), b(62);
    // Different histories before the step do not matter once the stream matches.
    Rng warm(99);
    step_single({0.3, 0.5, 0.2, std::nullopt}, 1.0, 1.0, warm);
    const auto x = step_single(s, 1.0, 1.0, a);
    const auto y = step_single(s, 1.0, 1.0, b);
    EXPECT_EQ(x.dwell, y.dwell);
    EXPECT_EQ(x.state.t_r, y.state.t_r);
    EXPECT_EQ(x.state.h_r, y.state.h_r);
}

TEST(Markov, SingleSpeedMeanDwell) {
    Rng rng(63);
    const auto chain = run_chain(20000, single_speed_config(1.0, 1.0, 0.0, 100.0, 63), rng);
    std::vector<double> d;
    for (std::size_t i = 0; i < chain.size(); i += 5) d.push_back(chain[i].dwell);
    const auto s = stats::summarize(d);
    EXPECT_NEAR(s.mean, pi / 4.0, 4.0 * s.se());
}

// P(dwell > d) from the explored-area formula against repeated steps from
// one fixed state.
TEST(Markov, SurvivalMatchesRepeatedSteps) {
    const MarkovState s{0.5, 0.8, 0.7, std::nullopt};
    Rng rng(64);
    const int n = 20000;
    std::vector<double> dwell;
    for (int i = 0; i < n; ++i) dwell.push_back(step_single(s, 1.0, 1.0, rng).dwell);
    for (double d : {0.1, 0.3, 0.6, 1.0}) {
        std::size_t k = 0;
        for (double x : dwell) k += x > d ? 1 : 0;
        EXPECT_TRUE(stats::wilson_ci(k, n, 0.999).contains(dwell_survival_single(s, 1.0, 1.0, d)))
            << d << " " << static_cast<double>(k) / n;
    }
    EXPECT_EQ(dwell_survival_single(s, 1.0, 1.0, 0.0), 1.0);
}

TEST(Markov, TwoSpeedTransitionsRespectTable) {
    Rng rng(65);
    const auto chain = run_chain(20000, two_speed_config(65), rng);
    const auto table = two_speed_transition_table();
    std::vector<std::size_t> seen(6, 0);
    for (std::size_t i = 1; i < chain.size(); ++i) {
        const auto a = two_speed_type_index(*chain[i - 1].state.type);
        const auto b = two_speed_type_index(*chain[i].state.type);
        ASSERT_GE(a, 0);
        ASSERT_GE(b, 0);
        EXPECT_EQ(table[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)], 1) << a << "->" << b;
        ++seen[static_cast<std::size_t>(b)];
        // After a handover to the left the next one is to the right.
        if (chain[i - 1].state.type->q == 2) EXPECT_EQ(chain[i].state.type->q, 1);
    }
    for (auto c : seen) EXPECT_GT(c, 0u);
}

TEST(Markov, TwoSpeedTypeFrequencies) {
    Rng rng(66);
    const auto cfg = two_speed_config(66);
    const auto chain = run_chain(40000, cfg, rng);
    const auto types = enumerate_types(2);
    double total = 0.0;
    for (const auto& t : types) total += analytic_type_frequency(t, cfg.classes);
    std::vector<std::size_t> counts(6, 0);
    for (const auto& r : chain) ++counts[static_cast<std::size_t>(two_speed_type_index(*r.state.type))];
    for (std::size_t k = 0; k < 6; ++k) {
        const double p = analytic_type_frequency(types[k], cfg.classes) / total;
        const double obs = static_cast<double>(counts[k]) / static_cast<double>(chain.size());
        // Correlated samples: allow a few effective-sample standard errors.
        EXPECT_NEAR(obs, p, 6.0 * std::sqrt(p * (1 - p) / 4000.0)) << type_label(types[k]);
    }
}

TEST(Markov, UnexploredBounds) {
    EXPECT_EQ(unexplored_lower_bound({1, 1, 1}, 1, 0.5, 1.0), 1.0);
    EXPECT_TRUE(std::isinf(unexplored_lower_bound({1, 1, 1}, 2, 0.5, 1.0)));
    EXPECT_EQ(unexplored_lower_bound({1, 2, 2}, 1, 0.5, 1.0), 0.5);
    EXPECT_EQ(unexplored_lower_bound({1, 2, 1}, 2, 0.5, 1.0), 0.0);
    EXPECT_EQ(unexplored_lower_bound({2, 1, 2}, 2, 0.5, 1.0), 0.0);
    EXPECT_EQ(unexplored_lower_bound({2, 2, 1}, 2, 0.5, 1.0), 1.0);
    EXPECT_EQ(unexplored_lower_bound({2, 1, 2}, 1, 0.5, 1.0), 0.5);
}

TEST(Markov, RunChainArguments) {
    Rng rng(67);
    EXPECT_EQ(run_chain(1, single_speed_config(1.0, 1.0, 0.0, 10.0, 1), rng, 0).size(), 1u);
    EXPECT_THROW(run_chain(0, single_speed_config(1.0, 1.0, 0.0, 10.0, 1), rng), ConfigError);
    ScenarioConfig three;
    three.classes = {{1, 3.0, 0.3}, {2, 2.0, 0.3}, {3, 1.0, 0.3}};
    EXPECT_THROW(run_chain(5, three, rng), ConfigError);
    EXPECT_THROW(step_two_speed({1.0, 1.0, 1.0, std::nullopt}, two_speed_config(1).classes, rng),
                 DomainError);
}

TEST(Markov, InitStateIsAHandover) {
    Rng rng(68);
    const auto s = init_state(two_speed_config(68), rng);
    ASSERT_TRUE(s.type.has_value());
    EXPECT_NO_THROW(state_geometry(s, two_speed_config(68).classes));
}

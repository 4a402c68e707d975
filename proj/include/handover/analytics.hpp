#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "handover/geometry.hpp"

namespace handover {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;  // absolute error estimate
};

struct McResult {
    double value = 0.0;
    double se = 0.0;
    std::size_t n = 0;
};

double handover_frequency_single(double lambda, double v);
double pure_frequency(double lambda_l, double lambda_total, double v_l);
double visible_head_intensity(double lambda, double v);

// Which head sits on the left of the pair.
enum class Orientation { slow_left, fast_left };

// Frequency of mixed handovers at the k-th crossing of a fast/slow pair.
// slow_left gives the pair with the slow head on the left.
QuadResult mixed_frequency(int k, const SpeedClass& fast, const SpeedClass& slow,
                           double lambda_total, Orientation orientation = Orientation::slow_left);

// Triple integral of exp(-(lambda pi + gamma) h_k^2) over the pair
// configurations (slow head on the left). Equals the mixed frequency
// divided by 4 lambda_1 lambda_2 v_1 v_2 at gamma = 0.
QuadResult mixed_pair_integral(int k, double v_fast, double v_slow, double lambda_total,
                               double gamma, Orientation orientation = Orientation::slow_left);

struct FrequencyBreakdown {
    std::vector<double> pure;            // per class
    std::vector<QuadResult> mixed;       // slow-left pairs: (i<j, k) flattened
    std::vector<std::string> mixed_labels;
    QuadResult total;
};

FrequencyBreakdown frequency_breakdown(const std::vector<SpeedClass>& classes);
QuadResult total_frequency(const std::vector<SpeedClass>& classes);

enum class LawKind { handover_distance, visible_head_distance, typical_time_distance,
                     handover_distance_squared };

struct PalmLaw {
    LawKind kind = LawKind::handover_distance;
    std::string name;
    double lambda = 1.0;
    double pdf(double x) const;
    double cdf(double x) const;
    // E[exp(-gamma X)], by quadrature of the density except for the
    // squared distance, which has a closed form.
    double laplace(double gamma) const;
    double mean() const;
};

PalmLaw palm_law(const std::string& name, double lambda);

struct LaplaceOrderRow {
    double gamma = 0.0;
    double handover = 0.0;
    double typical = 0.0;
    double visible = 0.0;
    bool holds = false;
};

std::vector<LaplaceOrderRow> laplace_order_check(double lambda, const std::vector<double>& gammas);

// E[exp(-rho T)] for the single-speed inter-handover time, by importance
// sampled Monte Carlo over the three consecutive serving heads.
McResult laplace_T_single(double rho, double lambda, double v, std::size_t mc_samples,
                          std::uint64_t seed = 7);

// (1 - E[exp(-rho T)]) / rho estimated on the same samples, without the
// subtraction noise of two separate estimates.
McResult laplace_T_single_slope(double rho, double lambda, double v, std::size_t mc_samples,
                                std::uint64_t seed = 7);

struct SelfTestReport {
    double max_identity = 0.0;
    double gaussian_closed = 0.0;
    double gaussian_quadrature = 0.0;
    double gaussian_zero_b = 0.0;
    bool pass = false;
};

SelfTestReport identity_selftests();

// Laplace transform of the squared handover distance, two classes.
QuadResult mixed_H2_laplace(double gamma, const std::vector<SpeedClass>& classes);

} // namespace handover

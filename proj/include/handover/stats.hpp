#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace handover::stats {

struct TestResult {
    std::string name;
    double statistic = 0.0;
    double p_value = 1.0;
    std::size_t n = 0;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool contains(double x) const { return lo <= x && x <= hi; }
};

struct Summary {
    std::size_t n = 0;
    double mean = 0.0;
    double variance = 0.0;  // unbiased
    double se() const;
};

Summary summarize(const std::vector<double>& xs);

// P(K > x) for the Kolmogorov limiting distribution.
double kolmogorov_survival(double x);

// Both tests need at least 30 observations per sample.
TestResult ks_one_sample(std::vector<double> samples, const std::function<double(double)>& cdf);
TestResult ks_two_sample(std::vector<double> a, std::vector<double> b);

// Pearson statistic with df = bins - 1 - ddof.
TestResult chi_square(const std::vector<double>& counts, const std::vector<double>& expected,
                      int ddof = 0);
// Same statistic with df = bins (fully specified expectations, no sum constraint).
TestResult chi_square_independent(const std::vector<double>& counts,
                                  const std::vector<double>& expected);

// (n - 1) s^2 / mean against chi-square(n - 1), two-sided.
TestResult poisson_dispersion(const std::vector<double>& counts);

Interval wilson_ci(std::size_t k, std::size_t n, double level = 0.95);
Interval normal_ci(double mean, double se, double level = 0.95);

// Two-sided z-test for equality of two estimates with standard errors.
TestResult z_test(double a, double se_a, double b, double se_b);

// Two-sided test that two Poisson counts over equal exposure share a rate.
TestResult two_proportion(std::size_t k1, std::size_t k2);

double normal_quantile(double p);

} // namespace handover::stats

#include "handover/stats.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include "handover/errors.hpp"

namespace handover::stats {

namespace {

constexpr std::size_t min_ks_samples = 30;

double clamp_p(double p) { return std::clamp(p, 0.0, 1.0); }

} // namespace

double Summary::se() const { return n > 1 ? std::sqrt(variance / static_cast<double>(n)) : 0.0; }

Summary summarize(const std::vector<double>& xs) {
    // Welford.
    Summary s;
    double m2 = 0.0;
    for (double x : xs) {
        ++s.n;
        const double d1 = x - s.mean;
        s.mean += d1 / static_cast<double>(s.n);
        m2 += d1 * (x - s.mean);
    }
    if (s.n > 1) s.variance = m2 / static_cast<double>(s.n - 1);
    return s;
}

double kolmogorov_survival(double x) {
    if (x <= 0.0) return 1.0;
    if (x < 1.18) {
        // Theta-function form converges fast for small x.
        const double pi = 3.14159265358979323846;
        const double y = -pi * pi / (8.0 * x * x);
        double sum = 0.0;
        for (int k = 1; k < 50; k += 2) sum += std::exp(y * k * k);
        return clamp_p(1.0 - std::sqrt(2.0 * pi) / x * sum);
    }
    double sum = 0.0;
    for (int k = 1; k < 100; ++k) {
        const double term = std::exp(-2.0 * k * k * x * x);
        sum += (k % 2 ? 1.0 : -1.0) * term;
        if (term < 1e-18) break;
    }
    return clamp_p(2.0 * sum);
}

TestResult ks_one_sample(std::vector<double> samples, const std::function<double(double)>& cdf) {
    if (samples.size() < min_ks_samples) throw InsufficientSamples("ks_one_sample needs n >= 30");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max({d, (i + 1) / n - f, f - i / n});
    }
    const double rn = std::sqrt(n);
    // Stephens' finite-n correction of the asymptotic law.
    const double p = kolmogorov_survival((rn + 0.12 + 0.11 / rn) * d);
    return {"ks_one_sample", d, p, samples.size()};
}

TestResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.size() < min_ks_samples || b.size() < min_ks_samples)
        throw InsufficientSamples("ks_two_sample needs n >= 30 per sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(i / na - j / nb));
    }
    const double ne = std::sqrt(na * nb / (na + nb));
    const double p = kolmogorov_survival((ne + 0.12 + 0.11 / ne) * d);
    return {"ks_two_sample", d, p, a.size() + b.size()};
}

namespace {

TestResult chi_square_df(const std::vector<double>& counts, const std::vector<double>& expected,
                         double df, const char* name) {
    if (counts.size() != expected.size() || counts.empty())
        throw std::invalid_argument("chi_square: size mismatch");
    double x = 0.0;
    double total = 0.0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        if (!(expected[k] > 0.0)) throw ZeroExpected();
        x += (counts[k] - expected[k]) * (counts[k] - expected[k]) / expected[k];
        total += counts[k];
    }
    if (df < 1.0) throw InsufficientSamples("chi_square: no degrees of freedom");
    boost::math::chi_squared dist(df);
    return {name, x, clamp_p(boost::math::cdf(boost::math::complement(dist, x))),
            static_cast<std::size_t>(total)};
}

} // namespace

TestResult chi_square(const std::vector<double>& counts, const std::vector<double>& expected,
                      int ddof) {
    return chi_square_df(counts, expected, static_cast<double>(counts.size()) - 1.0 - ddof,
                         "chi_square");
}

TestResult chi_square_independent(const std::vector<double>& counts,
                                  const std::vector<double>& expected) {
    return chi_square_df(counts, expected, static_cast<double>(counts.size()),
                         "chi_square_independent");
}

TestResult poisson_dispersion(const std::vector<double>& counts) {
    if (counts.size() < 2) throw InsufficientSamples("poisson_dispersion needs n >= 2");
    const Summary s = summarize(counts);
    if (!(s.mean > 0.0)) throw ZeroExpected();
    const double df = static_cast<double>(s.n - 1);
    const double x = df * s.variance / s.mean;
    boost::math::chi_squared dist(df);
    const double lower = boost::math::cdf(dist, x);
    return {"poisson_dispersion", x, clamp_p(2.0 * std::min(lower, 1.0 - lower)), s.n};
}

double normal_quantile(double p) { return boost::math::quantile(boost::math::normal(), p); }

Interval wilson_ci(std::size_t k, std::size_t n, double level) {
    if (n == 0) throw InsufficientSamples("wilson_ci needs n > 0");
    const double z = normal_quantile(0.5 + level / 2.0);
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(k) / nn;
    const double denom = 1.0 + z * z / nn;
    const double centre = (p + z * z / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z * z / (4.0 * nn * nn)) / denom;
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

Interval normal_ci(double mean, double se, double level) {
    const double z = normal_quantile(0.5 + level / 2.0);
    return {mean - z * se, mean + z * se};
}

TestResult z_test(double a, double se_a, double b, double se_b) {
    const double se = std::sqrt(se_a * se_a + se_b * se_b);
    const double z = se > 0.0 ? (a - b) / se : 0.0;
    const double p = 2.0 * boost::math::cdf(boost::math::complement(boost::math::normal(),
                                                                     std::abs(z)));
    return {"z_test", z, clamp_p(p), 2};
}

TestResult two_proportion(std::size_t k1, std::size_t k2) {
    // Conditional on the total, k1 ~ Binomial(k1 + k2, 1/2) under the null.
    const double n = static_cast<double>(k1 + k2);
    if (n == 0.0) return {"two_proportion", 0.0, 1.0, 0};
    const double z = (static_cast<double>(k1) - n / 2.0) / std::sqrt(n / 4.0);
    const double p = 2.0 * boost::math::cdf(boost::math::complement(boost::math::normal(),
                                                                     std::abs(z)));
    return {"two_proportion", z, clamp_p(p), k1 + k2};
}

} // namespace handover::stats

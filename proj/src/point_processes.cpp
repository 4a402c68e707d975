#include "handover/point_processes.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "handover/errors.hpp"

namespace handover {

namespace {

constexpr double pi = 3.14159265358979323846;

double wrap_angle(double a) {
    a = std::fmod(a + pi, 2.0 * pi);
    if (a < 0.0) a += 2.0 * pi;
    return a - pi;
}

void refresh_polar(PlanarStation& st) {
    st.R = std::hypot(st.x, st.y);
    st.alpha = wrap_angle(st.theta - std::atan2(st.y, st.x));
}

std::uint64_t poisson_count(double mean, Rng& rng) {
    if (!(mean > 0.0)) return 0;
    std::poisson_distribution<std::uint64_t> dist(mean);
    return dist(rng);
}

} // namespace

double ScenarioConfig::total_lambda() const {
    double s = 0.0;
    for (const auto& c : classes) s += c.lambda;
    return s;
}

double ScenarioConfig::min_speed() const {
    double m = classes.empty() ? 1.0 : classes.front().v;
    for (const auto& c : classes) m = std::min(m, c.v);
    return m;
}

double ScenarioConfig::speed_of(int cls) const {
    for (const auto& c : classes)
        if (c.index == cls) return c.v;
    throw ConfigError("unknown class index");
}

void ScenarioConfig::validate() const {
    if (classes.empty()) throw ConfigError("no speed classes");
    for (std::size_t i = 0; i < classes.size(); ++i) {
        const auto& c = classes[i];
        if (!(c.v > 0.0)) throw ConfigError("speeds must be positive");
        if (!(c.lambda >= 0.0)) throw ConfigError("intensities must be non-negative");
        if (c.index != static_cast<int>(i) + 1) throw ConfigError("class indices must be 1..n");
        if (i > 0 && !(c.v < classes[i - 1].v))
            throw ConfigError("speeds must be strictly decreasing");
    }
    if (!(total_lambda() > 0.0)) throw ConfigError("total intensity must be positive");
    if (!(t_start < t_end)) throw ConfigError("window must satisfy t_start < t_end");
    if (!(epsilon > 0.0 && epsilon < 0.5)) throw ConfigError("epsilon must lie in (0, 0.5)");
}

ScenarioConfig single_speed_config(double lambda, double v, double t_start, double t_end,
                                   std::uint64_t seed, double epsilon) {
    ScenarioConfig c;
    c.classes = {SpeedClass{1, v, lambda}};
    c.t_start = t_start;
    c.t_end = t_end;
    c.seed = seed;
    c.epsilon = epsilon;
    return c;
}

std::vector<PlanarStation> sample_planar_stations(double lambda, double radius,
                                                  const DirectionLaw& law, Rng& rng, double v,
                                                  int cls) {
    std::vector<PlanarStation> out;
    const auto n = poisson_count(lambda * pi * radius * radius, rng);
    out.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        PlanarStation st;
        const double r = radius * std::sqrt(rng.uniform());
        const double phi = 2.0 * pi * rng.uniform();
        st.x = r * std::cos(phi);
        st.y = r * std::sin(phi);
        st.theta = law.kind == DirectionLaw::Kind::fixed ? law.theta : 2.0 * pi * rng.uniform();
        st.v = v;
        st.cls = cls;
        refresh_polar(st);
        out.push_back(st);
    }
    return out;
}

std::vector<PlanarStation> displace(const std::vector<PlanarStation>& stations, double t) {
    std::vector<PlanarStation> out = stations;
    for (auto& st : out) {
        st.x += st.v * t * std::cos(st.theta);
        st.y += st.v * t * std::sin(st.theta);
        refresh_polar(st);
    }
    return out;
}

HeadWindow window_with_cap(const ScenarioConfig& config, double h_max) {
    HeadWindow w;
    w.h_max = h_max;
    const double buffer = h_max / config.min_speed();
    w.guard = buffer;
    w.t_lo = config.t_start - buffer;
    w.t_hi = config.t_end + buffer;
    for (const auto& c : config.classes)
        w.expected_counts.push_back(2.0 * c.lambda * c.v * (w.t_hi - w.t_lo) * h_max);
    return w;
}

HeadWindow size_window(const ScenarioConfig& config) {
    const double lambda = config.total_lambda();
    if (!(lambda > 0.0)) throw ConfigError("total intensity must be positive");
    double rate_upper = 0.0;
    for (const auto& c : config.classes) rate_upper += 4.0 * c.v * std::sqrt(lambda) / pi;
    const double expected = std::max(1.0, rate_upper * (config.t_end - config.t_start));
    const double h_max = std::sqrt(std::log(expected / config.epsilon) / (lambda * pi));
    return window_with_cap(config, h_max);
}

void sample_head_box(double rate_density, int cls, double t0, double t1, double h0, double h1,
                     Rng& rng, std::vector<HeadPoint>& out) {
    if (!(t1 > t0) || !(h1 > h0)) return;
    const auto n = poisson_count(rate_density * (t1 - t0) * (h1 - h0), rng);
    for (std::uint64_t i = 0; i < n; ++i) {
        const double t = t0 + (t1 - t0) * rng.uniform();
        const double h = h0 + (h1 - h0) * rng.uniform();
        out.push_back(HeadPoint{t, h, cls});
    }
}

Realization sample_heads(const ScenarioConfig& config, const HeadWindow& window, Rng& rng) {
    Realization real;
    real.config = config;
    real.window = window;
    for (const auto& c : config.classes) {
        Rng stream = rng.split(static_cast<std::uint64_t>(c.index));
        sample_head_box(2.0 * c.lambda * c.v, c.index, window.t_lo, window.t_hi, 0.0,
                        window.h_max, stream, real.heads);
    }
    rng();  // advance the parent so successive calls differ
    std::sort(real.heads.begin(), real.heads.end(), [](const HeadPoint& a, const HeadPoint& b) {
        return a.t < b.t || (a.t == b.t && (a.h < b.h || (a.h == b.h && a.cls < b.cls)));
    });
    return real;
}

} // namespace handover

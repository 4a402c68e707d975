#pragma once

#include <cstdint>
#include <vector>

#include "handover/geometry.hpp"
#include "handover/rng.hpp"

namespace handover {

struct DirectionLaw {
    enum class Kind { uniform, fixed } kind = Kind::uniform;
    double theta = 0.0;  // used when kind == fixed
};

struct ScenarioConfig {
    std::vector<SpeedClass> classes;
    double t_start = 0.0;
    double t_end = 100.0;
    double epsilon = 1e-3;
    DirectionLaw direction_law;
    std::uint64_t seed = 1;

    double total_lambda() const;
    double min_speed() const;
    // Speed of the class with the given 1-based index.
    double speed_of(int cls) const;
    // Throws ConfigError on invalid settings.
    void validate() const;
};

// Single-class scenario helper.
ScenarioConfig single_speed_config(double lambda, double v, double t_start, double t_end,
                                   std::uint64_t seed, double epsilon = 1e-3);

struct HeadWindow {
    double t_lo = 0.0;
    double t_hi = 0.0;
    double h_max = 0.0;
    double guard = 0.0;                   // h_max / slowest speed
    std::vector<double> expected_counts;  // per class
};

struct Realization {
    std::vector<HeadPoint> heads;  // sorted by t
    ScenarioConfig config;
    HeadWindow window;
    bool overflow_flag = false;
};

std::vector<PlanarStation> sample_planar_stations(double lambda, double radius,
                                                  const DirectionLaw& law, Rng& rng,
                                                  double v = 1.0, int cls = 1);

std::vector<PlanarStation> displace(const std::vector<PlanarStation>& stations, double t);

HeadWindow size_window(const ScenarioConfig& config);

// Sizes the window for a given height cap instead of the epsilon rule.
HeadWindow window_with_cap(const ScenarioConfig& config, double h_max);

Realization sample_heads(const ScenarioConfig& config, const HeadWindow& window, Rng& rng);

// Poisson heads of one class on [t0, t1] x [h0, h1] with density 2 lambda v.
void sample_head_box(double rate_density, int cls, double t0, double t1, double h0, double h1,
                     Rng& rng, std::vector<HeadPoint>& out);

} // namespace handover

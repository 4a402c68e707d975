#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "handover/envelope.hpp"
#include "handover/point_processes.hpp"
#include "handover/rng.hpp"

namespace handover {

// (h_l, t_r, h_r): height of the left head, offset of the right head from
// it, height of the right head. `type` is set for two-speed chains.
// For q = 1 the previous station owns the left head, for q = 2 the next one.
struct MarkovState {
    double h_l = 1.0;
    double t_r = 0.0;
    double h_r = 1.0;
    std::optional<HandoverType> type;
};

struct StepResult {
    MarkovState state;
    double dwell = 0.0;
    double distance = 0.0;
    bool reappearance = false;
};

// Handover time and height of a state, in the frame where the left head
// sits at t = 0.
struct StateGeometry {
    RadialBird prev;
    RadialBird next;
    double s = 0.0;
    double h = 0.0;
};

StateGeometry state_geometry(const MarkovState& state, const std::vector<SpeedClass>& classes);

// Left end of the unexplored region of class `cls` (right of this abscissa,
// outside the closed half-ellipse of the current handover).
double unexplored_lower_bound(const HandoverType& type, int cls, double s_hat, double t_r);

StepResult step_single(const MarkovState& state, double lambda, double v, Rng& rng);
StepResult step_two_speed(const MarkovState& state, const std::vector<SpeedClass>& classes,
                          Rng& rng);

// State at the first interior event of a short direct simulation.
MarkovState init_state(const ScenarioConfig& config, Rng& rng);

// Iterates the chain; the first `burn_in` steps are discarded.
std::vector<StepResult> run_chain(std::size_t n_steps, const ScenarioConfig& config, Rng& rng,
                                  std::size_t burn_in = 100);

// P(dwell > d | state) for the single-speed chain, from the area of the
// explored region.
double dwell_survival_single(const MarkovState& state, double lambda, double v, double d);

} // namespace handover

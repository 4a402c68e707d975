#include "handover/markov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "handover/errors.hpp"
#include "handover/simulation.hpp"

namespace handover {

namespace {

constexpr double pi = 3.14159265358979323846;
constexpr double inf = std::numeric_limits<double>::infinity();

double sq(double x) { return x * x; }

const SpeedClass& class_of(const std::vector<SpeedClass>& classes, int index) {
    for (const auto& c : classes)
        if (c.index == index) return c;
    throw DomainError("state refers to an unknown class");
}

// Sampled part of the unexplored region of one class: [t0, t1] x [0, hb].
struct ClassBox {
    SpeedClass cls;
    double t_lo = -inf;
    double t0 = 0.0, t1 = 0.0, hb = 0.0;
    bool empty = true;
};

void grow_box(ClassBox& box, double s_hat, double h_hat, double t1, double hb, Rng& rng,
              std::vector<HeadPoint>& fresh) {
    const double rate = 2.0 * box.cls.lambda * box.cls.v;
    const double t0 = std::max(box.t_lo, s_hat - hb / box.cls.v);
    std::vector<HeadPoint> pts;
    if (box.empty) {
        if (t1 > t0) sample_head_box(rate, box.cls.index, t0, t1, 0.0, hb, rng, pts);
        box.empty = false;
        box.t0 = t0;
        box.t1 = t1;
        box.hb = hb;
    } else {
        if (t0 < box.t0) sample_head_box(rate, box.cls.index, t0, box.t0, 0.0, hb, rng, pts);
        if (t1 > box.t1) sample_head_box(rate, box.cls.index, box.t1, t1, 0.0, hb, rng, pts);
        if (hb > box.hb && box.t1 > box.t0)
            sample_head_box(rate, box.cls.index, box.t0, box.t1, box.hb, hb, rng, pts);
    }
    box.t0 = std::min(t0, box.t0);
    box.t1 = std::max(t1, box.t1);
    box.hb = std::max(hb, box.hb);
    for (const auto& p : pts)
        if (sq(box.cls.v * (p.t - s_hat)) + sq(p.h) > sq(h_hat)) fresh.push_back(p);
}

StepResult step_generic(const MarkovState& state, const std::vector<SpeedClass>& classes,
                        Rng& rng) {
    const HandoverType type = state.type.value_or(HandoverType{1, 1, 1});
    const StateGeometry g = state_geometry(state, classes);
    const RadialBird& n = g.next;
    const RadialBird& p = g.prev;

    double lambda = 0.0, v_min = inf;
    std::vector<ClassBox> boxes;
    for (const auto& c : classes) {
        lambda += c.lambda;
        v_min = std::min(v_min, c.v);
        ClassBox b;
        b.cls = c;
        b.t_lo = unexplored_lower_bound(type, c.index, g.s, state.t_r);
        boxes.push_back(b);
    }
    const double scale = 1.0 / std::sqrt(lambda * pi);
    const double hb_limit = g.h + 1e3 * scale;

    // The previous station is a deterministic candidate: it can come back
    // through its second crossing with the next one.
    double best = inf;
    HeadPoint best_head;
    bool reappear = false;
    if (auto r = down_crossing(n, p); r && *r > g.s) {
        best = *r;
        best_head = p.head;
        reappear = true;
    }

    std::vector<HeadPoint> fresh;
    std::size_t scanned = 0;
    double hb = g.h + 2.0 * scale;
    double t1 = g.s + 2.0 * hb / v_min;
    while (true) {
        for (auto& b : boxes) grow_box(b, g.s, g.h, t1, hb, rng, fresh);
        for (; scanned < fresh.size(); ++scanned) {
            const HeadPoint& u = fresh[scanned];
            const auto c = down_crossing(n, {u, class_of(classes, u.cls).v});
            if (c && *c > g.s && *c < best) {
                best = *c;
                best_head = u;
                reappear = false;
            }
        }
        // A head crossing before `best` sits below the larger of the two
        // end heights of n on [s_hat, best].
        if (std::isfinite(best)) {
            const double m = std::max(g.h, bird_height(n, best));
            const double need_t1 = best + m / v_min;
            if (m <= hb && need_t1 <= t1) break;
            hb = std::max(hb, m);
            t1 = std::max(t1, need_t1);
        } else {
            hb *= 2.0;
            t1 = g.s + 2.0 * hb / v_min;
        }
        if (hb > hb_limit) throw Overflow("markov step found no crossing in the bounding box");
    }

    StepResult out;
    out.dwell = best - g.s;
    out.distance = bird_height(n, best);
    out.reappearance = reappear;
    const HandoverType next = classify(n.head, best_head);
    if (next.q == 1) {
        out.state.h_l = n.head.h;
        out.state.t_r = best_head.t - n.head.t;
        out.state.h_r = best_head.h;
    } else {
        out.state.h_l = best_head.h;
        out.state.t_r = n.head.t - best_head.t;
        out.state.h_r = n.head.h;
    }
    if (state.type) out.state.type = next;
    return out;
}

} // namespace

StateGeometry state_geometry(const MarkovState& state, const std::vector<SpeedClass>& classes) {
    if (!(state.h_l > 0.0) || !(state.h_r > 0.0) || state.t_r < 0.0)
        throw DomainError("markov state needs positive heights and t_r >= 0");
    const HandoverType type = state.type.value_or(HandoverType{1, 1, 1});
    const HeadPoint left{0.0, state.h_l, type.q == 1 ? type.tau_p : type.tau_n};
    const HeadPoint right{state.t_r, state.h_r, type.q == 1 ? type.tau_n : type.tau_p};
    StateGeometry g;
    const HeadPoint& ph = type.q == 1 ? left : right;
    const HeadPoint& nh = type.q == 1 ? right : left;
    g.prev = {ph, class_of(classes, ph.cls).v};
    g.next = {nh, class_of(classes, nh.cls).v};
    const auto s = down_crossing(g.prev, g.next);
    if (!s) throw DomainError("markov state does not describe a handover");
    g.s = *s;
    g.h = bird_height(g.next, g.s);
    return g;
}

double unexplored_lower_bound(const HandoverType& type, int cls, double s_hat, double t_r) {
    const int j = type.tau_n;
    if (type.q == 1) {
        if (cls == j) return t_r;
        if (type.tau_p == type.tau_n) return j == 1 ? -inf : s_hat;
        return j == 1 ? 0.0 : s_hat;
    }
    if (cls == j) return 0.0;
    return j == 1 ? t_r : s_hat;
}

StepResult step_single(const MarkovState& state, double lambda, double v, Rng& rng) {
    MarkovState s = state;
    s.type.reset();
    return step_generic(s, {SpeedClass{1, v, lambda}}, rng);
}

StepResult step_two_speed(const MarkovState& state, const std::vector<SpeedClass>& classes,
                          Rng& rng) {
    if (classes.size() != 2) throw DomainError("two-speed step needs exactly two classes");
    if (!state.type) throw DomainError("two-speed step needs a typed state");
    return step_generic(state, classes, rng);
}

MarkovState init_state(const ScenarioConfig& config, Rng& rng) {
    config.validate();
    ScenarioConfig c = config;
    c.seed = rng();
    c.t_start = 0.0;
    double length = 50.0 / (config.min_speed() * std::sqrt(config.total_lambda()));
    for (int attempt = 0; attempt < 8; ++attempt, length *= 2.0) {
        c.t_end = length;
        const ReplicaOutput rep = simulate_replica(c, 0);
        for (const auto& ev : rep.events) {
            if (ev.boundary) continue;
            const bool prev_left = ev.prev_head.t <= ev.next_head.t;
            const HeadPoint& l = prev_left ? ev.prev_head : ev.next_head;
            const HeadPoint& r = prev_left ? ev.next_head : ev.prev_head;
            MarkovState s;
            s.h_l = l.h;
            s.t_r = r.t - l.t;
            s.h_r = r.h;
            if (config.classes.size() > 1) s.type = ev.type;
            return s;
        }
    }
    throw NoEvents();
}

std::vector<StepResult> run_chain(std::size_t n_steps, const ScenarioConfig& config, Rng& rng,
                                  std::size_t burn_in) {
    if (n_steps < 1) throw ConfigError("run_chain needs at least one step");
    if (config.classes.size() > 2) throw ConfigError("markov chains support one or two classes");
    MarkovState state = init_state(config, rng);
    auto step = [&](const MarkovState& s) {
        if (config.classes.size() == 1)
            return step_single(s, config.classes[0].lambda, config.classes[0].v, rng);
        return step_two_speed(s, config.classes, rng);
    };
    for (std::size_t i = 0; i < burn_in; ++i) state = step(state).state;
    std::vector<StepResult> out;
    out.reserve(n_steps);
    for (std::size_t i = 0; i < n_steps; ++i) {
        out.push_back(step(state));
        state = out.back().state;
    }
    return out;
}

double dwell_survival_single(const MarkovState& state, double lambda, double v, double d) {
    if (d <= 0.0) return 1.0;
    MarkovState s = state;
    s.type.reset();
    const StateGeometry g = state_geometry(s, {SpeedClass{1, v, lambda}});
    const double s2 = g.s + d;
    const double h2 = bird_height(g.next, s2);
    const double area = half_ellipse_union_area(g.s, g.h, s2, h2, v) - pi * sq(g.h) / (2.0 * v);
    return std::exp(-2.0 * lambda * v * area);
}

} // namespace handover

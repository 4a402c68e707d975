#include "handover/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "handover/errors.hpp"

namespace handover {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

bool head_before(const HeadPoint& a, const HeadPoint& b) {
    if (a.t != b.t) return a.t < b.t;
    return a.cls < b.cls;
}

// Breakpoint of two same-speed birds with a.t < b.t.
double line_break(const HeadPoint& a, const HeadPoint& b, double v) {
    return intersect_same_speed(RadialBird{a, v}, RadialBird{b, v}).s;
}

void check_overflow(const std::vector<EnvelopeSegment>& segs, Realization& real) {
    const double cap = real.window.h_max;
    for (const auto& seg : segs) {
        const RadialBird b{seg.serving, real.config.speed_of(seg.serving.cls)};
        if (bird_height(b, seg.t_from) > cap || bird_height(b, seg.t_to) > cap) {
            real.overflow_flag = true;
            return;
        }
    }
}

} // namespace

std::vector<double> class_speed_table(const ScenarioConfig& config) {
    std::vector<double> out(config.classes.size() + 1, 0.0);
    for (const auto& c : config.classes) out.at(static_cast<std::size_t>(c.index)) = c.v;
    return out;
}

std::vector<EnvelopeSegment> lower_envelope_lines(const std::vector<HeadPoint>& heads, double v,
                                                  double t_start, double t_end) {
    if (heads.empty()) throw EmptyRealization();
    // h^2 - v^2 t^2 is affine in t for every bird, so the envelope is a
    // lower envelope of lines. Slopes fall as T grows.
    std::vector<HeadPoint> sorted = heads;
    std::sort(sorted.begin(), sorted.end(), [](const HeadPoint& a, const HeadPoint& b) {
        return a.t < b.t || (a.t == b.t && (a.h < b.h || (a.h == b.h && a.cls < b.cls)));
    });
    std::vector<HeadPoint> hull;
    hull.reserve(sorted.size());
    for (const auto& p : sorted) {
        if (!hull.empty() && hull.back().t == p.t) continue;  // deeper head already kept
        while (hull.size() >= 2) {
            const auto& a = hull[hull.size() - 2];
            const auto& b = hull.back();
            if (line_break(a, b, v) >= line_break(b, p, v)) {
                hull.pop_back();
            } else {
                break;
            }
        }
        hull.push_back(p);
    }

    std::vector<EnvelopeSegment> segs;
    // First hull line active at t_start.
    std::size_t i = 0;
    while (i + 1 < hull.size() && line_break(hull[i], hull[i + 1], v) <= t_start) ++i;
    double t = t_start;
    while (true) {
        const double next = i + 1 < hull.size() ? line_break(hull[i], hull[i + 1], v) : inf;
        if (next >= t_end) {
            segs.push_back({t, t_end, hull[i]});
            break;
        }
        segs.push_back({t, next, hull[i]});
        t = next;
        ++i;
    }
    return segs;
}

std::vector<EnvelopeSegment> lower_envelope_sweep(const std::vector<HeadPoint>& heads,
                                                  const std::vector<double>& class_speed,
                                                  double t_start, double t_end, double reach) {
    if (heads.empty()) throw EmptyRealization();
    auto bird = [&](std::size_t i) {
        return RadialBird{heads[i], class_speed.at(static_cast<std::size_t>(heads[i].cls))};
    };

    std::size_t cur = 0;
    double best_h = inf;
    for (std::size_t i = 0; i < heads.size(); ++i) {
        const double h = bird_height_sq(bird(i), t_start);
        if (h < best_h || (h == best_h && head_before(heads[i], heads[cur]))) {
            best_h = h;
            cur = i;
        }
    }

    std::vector<EnvelopeSegment> segs;
    double t = t_start;
    while (true) {
        double best_r = inf;
        std::size_t best = cur;
        const RadialBird serving = bird(cur);
        auto it = std::lower_bound(heads.begin(), heads.end(), t - reach,
                                   [](const HeadPoint& p, double x) { return p.t < x; });
        for (auto i = static_cast<std::size_t>(it - heads.begin()); i < heads.size(); ++i) {
            if (heads[i].t > best_r + reach) break;
            if (i == cur) continue;
            const auto r = down_crossing(serving, bird(i));
            if (!r || !(*r > t)) continue;
            if (*r < best_r || (*r == best_r && head_before(heads[i], heads[best]))) {
                best_r = *r;
                best = i;
            }
        }
        if (best_r >= t_end) {
            segs.push_back({t, t_end, heads[cur]});
            break;
        }
        segs.push_back({t, best_r, heads[cur]});
        t = best_r;
        cur = best;
    }
    return segs;
}

std::vector<EnvelopeSegment> lower_envelope(Realization& real) {
    const auto& cfg = real.config;
    std::vector<EnvelopeSegment> segs;
    bool one_speed = true;
    for (const auto& c : cfg.classes) one_speed = one_speed && c.v == cfg.classes.front().v;
    if (one_speed) {
        segs = lower_envelope_lines(real.heads, cfg.classes.front().v, cfg.t_start, cfg.t_end);
    } else {
        segs = lower_envelope_sweep(real.heads, class_speed_table(cfg), cfg.t_start, cfg.t_end,
                                    real.window.guard);
    }
    check_overflow(segs, real);
    return segs;
}

HandoverType classify(const HeadPoint& prev_head, const HeadPoint& next_head) {
    return HandoverType{next_head.t >= prev_head.t ? 1 : 2, prev_head.cls, next_head.cls};
}

HandoverType classify(const HandoverEvent&, const EnvelopeSegment& prev_segment,
                      const EnvelopeSegment& next_segment) {
    return classify(prev_segment.serving, next_segment.serving);
}

OldNotation to_old_notation(const HandoverType& type) {
    OldNotation o;
    if (type.q == 1) {
        o.l = type.tau_p;
        o.r = type.tau_n;
    } else {
        o.l = type.tau_n;
        o.r = type.tau_p;
    }
    // At the first of two mixed crossings the faster bird takes over.
    o.k = (type.tau_p == type.tau_n || type.tau_n < type.tau_p) ? 1 : 2;
    return o;
}

std::string type_label(const HandoverType& type) {
    return "[" + std::to_string(type.q) + ";" + std::to_string(type.tau_p) + ","
           + std::to_string(type.tau_n) + "]";
}

int two_speed_type_index(const HandoverType& type) {
    static const HandoverType order[two_speed_type_count] = {
        {1, 1, 1}, {1, 2, 2}, {1, 1, 2}, {1, 2, 1}, {2, 1, 2}, {2, 2, 1}};
    for (int i = 0; i < two_speed_type_count; ++i)
        if (order[i] == type) return i;
    return -1;
}

HandoverType two_speed_type(int index) {
    static const HandoverType order[two_speed_type_count] = {
        {1, 1, 1}, {1, 2, 2}, {1, 1, 2}, {1, 2, 1}, {2, 1, 2}, {2, 2, 1}};
    return order[index];
}

std::vector<HandoverEvent> extract_handovers(const std::vector<EnvelopeSegment>& segments,
                                             const Realization& real) {
    const auto& cfg = real.config;
    const auto speed = class_speed_table(cfg);
    const double vmin = cfg.min_speed();
    const double guard = real.window.guard;
    std::vector<HandoverEvent> events;
    for (std::size_t k = 0; k + 1 < segments.size(); ++k) {
        const auto& a = segments[k];
        const auto& b = segments[k + 1];
        HandoverEvent ev;
        ev.s = a.t_to;
        const RadialBird pa{a.serving, speed[static_cast<std::size_t>(a.serving.cls)]};
        const RadialBird pb{b.serving, speed[static_cast<std::size_t>(b.serving.cls)]};
        ev.h = 0.5 * (bird_height(pa, ev.s) + bird_height(pb, ev.s));
        ev.prev_head = a.serving;
        ev.next_head = b.serving;
        ev.type = classify(ev, a, b);
        ev.boundary = ev.s < cfg.t_start + guard || ev.s > cfg.t_end - guard;

        // Void check: no head strictly inside any class half-ellipse.
        const double reach = ev.h / vmin;
        auto it = std::lower_bound(real.heads.begin(), real.heads.end(), ev.s - reach,
                                   [](const HeadPoint& p, double x) { return p.t < x; });
        for (; it != real.heads.end() && it->t <= ev.s + reach; ++it) {
            const double v = speed[static_cast<std::size_t>(it->cls)];
            const double r2 = (v * (it->t - ev.s)) * (v * (it->t - ev.s)) + it->h * it->h;
            if (r2 < ev.h * ev.h * (1.0 - 1e-9))
                throw VoidViolation("head inside the void region of an envelope breakpoint");
        }
        events.push_back(ev);
    }
    return events;
}

std::vector<HeadPoint> visible_heads(const std::vector<EnvelopeSegment>& segments) {
    std::vector<HeadPoint> out;
    for (const auto& seg : segments)
        if (seg.serving.t >= seg.t_from && seg.serving.t < seg.t_to) out.push_back(seg.serving);
    return out;
}

std::vector<double> distances_at(double t, const Realization& real) {
    const auto speed = class_speed_table(real.config);
    std::vector<double> out;
    out.reserve(real.heads.size());
    for (const auto& p : real.heads)
        out.push_back(bird_height(RadialBird{p, speed[static_cast<std::size_t>(p.cls)]}, t));
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace handover

#include "handover/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "handover/errors.hpp"

namespace handover {

namespace {

constexpr double pi = 3.14159265358979323846;

double sq(double x) { return x * x; }

double tangency_scale(double v1, double v2, double dt) {
    return 1e-12 * (sq(v1) * sq(v2) * sq(dt) + 1.0);
}

// asin with a sanity check on the argument; rounding can push it a hair
// outside [-1, 1].
double checked_asin(double x) {
    if (x > 1.0 + 1e-9 || x < -1.0 - 1e-9)
        throw std::logic_error("asin argument out of range");
    return std::asin(std::clamp(x, -1.0, 1.0));
}

// Area of the union of two upper half-ellipses with the same speed.
// Time is rescaled by v, which turns them into half-disks.
double union_area_core(double s1, double l1, double s2, double l2, double v) {
    if (!(l1 > 0.0) || !(l2 > 0.0) || !(v > 0.0)) throw NonPositiveRadius();
    if (s1 > s2) {
        std::swap(s1, s2);
        std::swap(l1, l2);
    }
    const double d = v * (s2 - s1);
    if (d >= l1 + l2) return pi * (sq(l1) + sq(l2)) / (2.0 * v);
    if (d <= std::abs(l1 - l2)) return pi * sq(std::max(l1, l2)) / (2.0 * v);

    // Crossing point of the two boundaries.
    const double tv = 0.5 * (s1 + s2) + (sq(l1) - sq(l2)) / (2.0 * sq(v) * (s2 - s1));
    const double hv = std::sqrt(std::max(0.0, sq(l1) - sq(v) * sq(tv - s1)));

    const double base = v * hv * (s2 - s1);
    if (s2 <= tv) return (pi * sq(l1) + base + union_f1(hv, l1, l2)) / (2.0 * v);
    if (tv <= s1) return (pi * sq(l2) + base - union_f1(hv, l1, l2)) / (2.0 * v);
    return (pi * (sq(l1) + sq(l2)) + base - union_f2(hv, l1, l2)) / (2.0 * v);
}

} // namespace

double bird_height_sq(const RadialBird& bird, double t) {
    return sq(bird.v * (t - bird.head.t)) + sq(bird.head.h);
}

double bird_height(const RadialBird& bird, double t) {
    return std::hypot(bird.v * (t - bird.head.t), bird.head.h);
}

HeadPoint head_from_station(const PlanarStation& st, double v) {
    return HeadPoint{-(st.R / v) * std::cos(st.alpha), st.R * std::abs(std::sin(st.alpha)), st.cls};
}

Intersection intersect_same_speed(const RadialBird& b1, const RadialBird& b2) {
    const double d = b1.head.t - b2.head.t;
    if (d == 0.0) throw EqualAbscissa();
    const double v = b1.v;
    // Midpoint plus a correction; avoids the cancellation in the
    // difference-of-squares form.
    const double s = 0.5 * (b1.head.t + b2.head.t)
                     + (sq(b1.head.h) - sq(b2.head.h)) / (2.0 * sq(v) * d);
    return Intersection{s, bird_height(b1, s), IntersectionKind::unique};
}

double mixed_discriminant(double t1, double h1, double t2, double h2, double v1, double v2) {
    return sq(v1) * sq(v2) * sq(t1 - t2) - (sq(h1) - sq(h2)) * (sq(v1) - sq(v2));
}

double critical_offset(double h1, double h2, double v1, double v2) {
    if (h1 <= h2) return 0.0;
    return std::sqrt(sq(h1) - sq(h2)) * std::sqrt(sq(v1) - sq(v2)) / (v1 * v2);
}

std::optional<double> down_crossing(const RadialBird& serving, const RadialBird& other) {
    const double vu2 = sq(other.v), vn2 = sq(serving.v);
    const double a = vu2 - vn2;
    const double d = other.head.t - serving.head.t;
    const double c = vu2 * sq(d) + sq(other.head.h) - sq(serving.head.h);
    const double disc = vu2 * vn2 * sq(d) - a * (sq(other.head.h) - sq(serving.head.h));
    if (a == 0.0) {
        if (!(d > 0.0)) return std::nullopt;
        return serving.head.t + c / (2.0 * vu2 * d);
    }
    if (disc < tangency_scale(other.v, serving.v, d)) return std::nullopt;
    // Root where the squared-height difference falls through zero:
    // x = (vu^2 d - sqrt(disc)) / a. For d >= 0 use the conjugate form,
    // which stays accurate as a -> 0.
    const double root = std::sqrt(disc);
    if (d >= 0.0) return serving.head.t + c / (vu2 * d + root);
    return serving.head.t + (vu2 * d - root) / a;
}

std::vector<Intersection> intersect_mixed(const RadialBird& fast, const RadialBird& slow) {
    const double v1 = fast.v, v2 = slow.v;
    const double t1 = fast.head.t, t2 = slow.head.t;
    const double delta = mixed_discriminant(t1, fast.head.h, t2, slow.head.h, v1, v2);
    if (std::abs(delta) < tangency_scale(v1, v2, t1 - t2)) {
        const double s = (sq(v1) * t1 - sq(v2) * t2) / (sq(v1) - sq(v2));
        return {Intersection{s, bird_height(fast, s), IntersectionKind::tangent}};
    }
    if (delta < 0.0) return {};
    // The fast bird dips below the slow one at the first root and climbs
    // back above it at the second.
    const auto first = down_crossing(slow, fast);
    const auto second = down_crossing(fast, slow);
    std::vector<Intersection> out;
    if (first) out.push_back({*first, bird_height(fast, *first), IntersectionKind::first});
    if (second) out.push_back({*second, bird_height(fast, *second), IntersectionKind::second});
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.s < y.s; });
    return out;
}

bool region_contains(const HalfEllipseRegion& region, const HeadPoint& p) {
    return p.h >= 0.0 && sq(region.v * (p.t - region.s)) + sq(p.h) < sq(region.u);
}

double union_f1(double h1, double h, double h2) {
    return sq(h2) * checked_asin(h1 / h2) - sq(h) * checked_asin(h1 / h);
}

double union_f2(double h1, double h, double h2) {
    return sq(h2) * checked_asin(h1 / h2) + sq(h) * checked_asin(h1 / h);
}

double half_ball_union_area(double s, double h, double s2, double h2) {
    return union_area_core(s, h, s2, h2, 1.0);
}

double half_ellipse_union_area(double s1, double l1, double s2, double l2, double v) {
    return union_area_core(s1, l1, s2, l2, v);
}

double hyperbola_extra_area(const HeadPoint& slow_head, double v2, double s_a, double s_b,
                            double v1) {
    if (!(v1 > v2)) throw DomainError("hyperbola_extra_area needs v1 > v2");
    if (s_b <= s_a) return 0.0;
    const double t2 = slow_head.t, h2 = slow_head.h;
    const double w = sq(v1) - sq(v2);
    const double c2 = sq(v1) * sq(v2) / w;
    const double ta = (s_a * w + sq(v2) * t2) / sq(v1);
    const double tb = (s_b * w + sq(v2) * t2) / sq(v1);
    const RadialBird slow{slow_head, v2};
    const double la2 = bird_height_sq(slow, s_a), lb2 = bird_height_sq(slow, s_b);

    auto gap = [&](double t) {
        const double hyp = std::sqrt(sq(h2) + c2 * sq(t - t2));
        const double ea = std::sqrt(std::max(0.0, la2 - sq(v1 * (t - s_a))));
        const double eb = std::sqrt(std::max(0.0, lb2 - sq(v1 * (t - s_b))));
        return std::max(0.0, hyp - std::max(ea, eb));
    };

    // Split at the kinks: ellipse feet and the crossing of the two arcs.
    std::vector<double> cuts{ta, tb};
    const double la = std::sqrt(la2), lb = std::sqrt(lb2);
    for (double x : {s_a - la / v1, s_a + la / v1, s_b - lb / v1, s_b + lb / v1})
        cuts.push_back(x);
    cuts.push_back(0.5 * (s_a + s_b) + (la2 - lb2) / (2.0 * sq(v1) * (s_b - s_a)));
    std::sort(cuts.begin(), cuts.end());

    double total = 0.0;
    double prev = ta;
    for (double x : cuts) {
        if (x <= prev) continue;
        const double hi = std::min(x, tb);
        if (hi > prev) {
            total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(gap, prev, hi,
                                                                                    12, 1e-11);
        }
        prev = hi;
        if (prev >= tb) break;
    }
    return total;
}

double gaussian_tail_integral(double a, double b) {
    if (!(a > 0.0) || b < 0.0) throw DomainError("gaussian_tail_integral needs a > 0, b >= 0");
    return std::sqrt(pi) / (2.0 * std::sqrt(a)) * std::exp(-2.0 * std::sqrt(a * b));
}

} // namespace handover

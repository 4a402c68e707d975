#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>

#include "handover/errors.hpp"
#include "handover/geometry.hpp"
#include "handover/point_processes.hpp"
#include "handover/rng.hpp"

using namespace handover;

namespace {

constexpr double pi = 3.14159265358979323846;

double bisect(const std::function<double(double)>& f, double a, double b) {
    double fa = f(a);
    for (int i = 0; i < 200; ++i) {
        const double m = 0.5 * (a + b), fm = f(m);
        if ((fm < 0) == (fa < 0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

// Sign changes of f on a dense grid, refined by bisection.
std::vector<double> grid_roots(const std::function<double(double)>& f, double a, double b, int n) {
    std::vector<double> roots;
    double x0 = a, f0 = f(a);
    for (int i = 1; i <= n; ++i) {
        const double x1 = a + (b - a) * i / n, f1 = f(x1);
        if ((f0 < 0) != (f1 < 0)) roots.push_back(bisect(f, x0, x1));
        x0 = x1;
        f0 = f1;
    }
    return roots;
}

double mc_union_area(double s1, double l1, double s2, double l2, double v, Rng& rng, int n) {
    const double t0 = std::min(s1 - l1 / v, s2 - l2 / v), t1 = std::max(s1 + l1 / v, s2 + l2 / v);
    const double hm = std::max(l1, l2);
    int hit = 0;
    for (int i = 0; i < n; ++i) {
        const double t = t0 + (t1 - t0) * rng.uniform(), h = hm * rng.uniform();
        const bool in1 = v * v * (t - s1) * (t - s1) + h * h < l1 * l1;
        const bool in2 = v * v * (t - s2) * (t - s2) + h * h < l2 * l2;
        hit += (in1 || in2) ? 1 : 0;
    }
    return (t1 - t0) * hm * hit / n;
}

} // namespace

TEST(Geometry, BirdHeightMatchesPythagoras) {
    const RadialBird b{{2.0, 0.5, 1}, 3.0};
    EXPECT_DOUBLE_EQ(bird_height(b, 2.0), 0.5);
    EXPECT_NEAR(bird_height(b, 3.0), std::sqrt(9.0 + 0.25), 1e-15);
    EXPECT_NEAR(bird_height_sq(b, 1.0), 9.25, 1e-14);
}

TEST(Geometry, SameSpeedIntersectionAgreesWithBisection) {
    Rng rng(11);
    for (int i = 0; i < 200; ++i) {
        const double v = 0.2 + 3.0 * rng.uniform();
        const RadialBird a{{-2.0 + 4.0 * rng.uniform(), 0.05 + 2.0 * rng.uniform(), 1}, v};
        RadialBird b{{-2.0 + 4.0 * rng.uniform(), 0.05 + 2.0 * rng.uniform(), 1}, v};
        if (std::abs(a.head.t - b.head.t) < 1e-3) continue;
        const auto x = intersect_same_speed(a, b);
        auto f = [&](double t) { return bird_height_sq(a, t) - bird_height_sq(b, t); };
        const auto roots = grid_roots(f, -200.0, 200.0, 4000);
        ASSERT_EQ(roots.size(), 1u);
        EXPECT_NEAR(x.s, roots[0], 1e-9);
        EXPECT_NEAR(x.h, bird_height(a, x.s), 1e-9);
        EXPECT_NEAR(x.h, bird_height(b, x.s), 1e-9);
    }
}

TEST(Geometry, EqualAbscissaThrows) {
    const RadialBird a{{1.0, 0.5, 1}, 1.0}, b{{1.0, 0.7, 1}, 1.0};
    EXPECT_THROW(intersect_same_speed(a, b), EqualAbscissa);
}

TEST(Geometry, MixedIntersectionsAgreeWithGridRoots) {
    Rng rng(12);
    int two = 0, zero = 0;
    for (int i = 0; i < 300; ++i) {
        const RadialBird fast{{-1.0 + 2.0 * rng.uniform(), 0.05 + 1.5 * rng.uniform(), 1}, 2.0};
        const RadialBird slow{{-1.0 + 2.0 * rng.uniform(), 0.05 + 1.5 * rng.uniform(), 2}, 1.0};
        const auto xs = intersect_mixed(fast, slow);
        auto f = [&](double t) { return bird_height_sq(fast, t) - bird_height_sq(slow, t); };
        const auto roots = grid_roots(f, -50.0, 50.0, 20000);
        if (xs.size() == 1) continue;  // tangency, not resolvable on a grid
        ASSERT_EQ(xs.size(), roots.size());
        for (std::size_t k = 0; k < xs.size(); ++k) {
            EXPECT_NEAR(xs[k].s, roots[k], 1e-8);
            EXPECT_NEAR(xs[k].h, bird_height(slow, xs[k].s), 1e-8);
        }
        if (xs.size() == 2) {
            ++two;
            EXPECT_LT(xs[0].s, xs[1].s);
        } else {
            ++zero;
        }
        // Discriminant sign decides whether the curves meet.
        const double disc = mixed_discriminant(fast.head.t, fast.head.h, slow.head.t, slow.head.h,
                                               fast.v, slow.v);
        EXPECT_EQ(disc > 0.0, xs.size() == 2);
    }
    EXPECT_GT(two, 20);
    EXPECT_GT(zero, 20);
}

TEST(Geometry, CriticalOffsetIsTangency) {
    const double h1 = 0.9, h2 = 0.4, v1 = 2.0, v2 = 1.0;
    const double c = critical_offset(h1, h2, v1, v2);
    EXPECT_NEAR(mixed_discriminant(0.0, h1, c, h2, v1, v2), 0.0, 1e-10);
    EXPECT_GT(mixed_discriminant(0.0, h1, 1.01 * c, h2, v1, v2), 0.0);
    EXPECT_LT(mixed_discriminant(0.0, h1, 0.99 * c, h2, v1, v2), 0.0);
    // A lower fast head always meets the slow curve.
    EXPECT_EQ(critical_offset(h2, h1, v1, v2), 0.0);
}

TEST(Geometry, DownCrossingChangesSignFromAboveToBelow) {
    Rng rng(13);
    for (int i = 0; i < 200; ++i) {
        const double vo = rng.uniform() < 0.5 ? 1.0 : 2.0;
        const RadialBird serving{{rng.uniform(), 0.05 + rng.uniform(), 1}, 1.0};
        const RadialBird other{{rng.uniform() * 3.0 - 1.0, 0.05 + rng.uniform(), 2}, vo};
        const auto d = down_crossing(serving, other);
        if (!d) continue;
        const double e = 1e-6;
        EXPECT_GT(bird_height(other, *d - e), bird_height(serving, *d - e));
        EXPECT_LT(bird_height(other, *d + e), bird_height(serving, *d + e));
    }
}

TEST(Geometry, RegionContainsIsOpen) {
    const HalfEllipseRegion r{0.0, 1.0, 2.0};
    EXPECT_TRUE(region_contains(r, {0.0, 0.99, 1}));
    EXPECT_FALSE(region_contains(r, {0.0, 1.0, 1}));
    EXPECT_FALSE(region_contains(r, {0.5, 0.0, 1}));
    EXPECT_TRUE(region_contains(r, {0.49, 0.0, 1}));
}

TEST(Geometry, UnionAreaMatchesMonteCarlo) {
    Rng rng(14);
    for (int i = 0; i < 25; ++i) {
        const double v = 0.5 + 2.0 * rng.uniform();
        const double s1 = rng.uniform(), s2 = s1 + 2.0 * rng.uniform();
        const double l1 = 0.1 + rng.uniform(), l2 = 0.1 + rng.uniform();
        const double exact = half_ellipse_union_area(s1, l1, s2, l2, v);
        const int n = 400000;
        const double mc = mc_union_area(s1, l1, s2, l2, v, rng, n);
        const double box = (std::max(s1 + l1 / v, s2 + l2 / v) - std::min(s1 - l1 / v, s2 - l2 / v))
                           * std::max(l1, l2);
        const double se = box * std::sqrt(0.25 / n);
        EXPECT_NEAR(exact, mc, 5.0 * se) << "case " << i;
    }
}

TEST(Geometry, UnionAreaLimits) {
    // Disjoint: sum of halves; nested: larger one.
    EXPECT_NEAR(half_ellipse_union_area(0, 1, 10, 2, 1), pi * 5 / 2, 1e-12);
    EXPECT_NEAR(half_ellipse_union_area(0, 2, 0.1, 0.5, 1), pi * 2, 1e-12);
    EXPECT_NEAR(half_ellipse_union_area(0, 1, 0, 1, 3), pi / 6, 1e-12);
    // Symmetric in argument order, and v rescales time.
    EXPECT_NEAR(half_ellipse_union_area(0, 1, 0.7, 0.8, 1), half_ellipse_union_area(0.7, 0.8, 0, 1, 1),
                1e-12);
    EXPECT_NEAR(half_ellipse_union_area(0, 1, 0.35, 0.8, 2), half_ellipse_union_area(0, 1, 0.7, 0.8, 1) / 2,
                1e-12);
    EXPECT_NEAR(half_ball_union_area(0, 1, 0.7, 0.8), half_ellipse_union_area(0, 1, 0.7, 0.8, 1), 1e-12);
    EXPECT_THROW(half_ellipse_union_area(0, 0, 1, 1, 1), NonPositiveRadius);
}

TEST(Geometry, UnionAreaIsMonotoneInSeparation) {
    double prev = 0.0;
    for (int k = 0; k <= 100; ++k) {
        const double a = half_ellipse_union_area(0.0, 1.0, 0.03 * k, 0.7, 1.0);
        EXPECT_GE(a, prev - 1e-12);
        prev = a;
    }
}

TEST(Geometry, HyperbolaExtraAreaMatchesMonteCarlo) {
    const HeadPoint slow{0.0, 0.6, 2};
    const double v1 = 2.0, v2 = 1.0, sa = -0.3, sb = 0.5;
    const double exact = hyperbola_extra_area(slow, v2, sa, sb, v1);
    EXPECT_GT(exact, 0.0);
    // Points between the hyperbola and both fast ellipses hung from the slow bird.
    const double w = v1 * v1 - v2 * v2, c2 = v1 * v1 * v2 * v2 / w;
    const double ta = (sa * w) / (v1 * v1), tb = (sb * w) / (v1 * v1);
    const RadialBird sb_bird{slow, v2};
    const double la2 = bird_height_sq(sb_bird, sa), lb2 = bird_height_sq(sb_bird, sb);
    const double hmax = std::sqrt(slow.h * slow.h + c2 * std::max(ta * ta, tb * tb));
    Rng rng(15);
    const int n = 2000000;
    int hit = 0;
    for (int i = 0; i < n; ++i) {
        const double t = ta + (tb - ta) * rng.uniform(), h = hmax * rng.uniform();
        const bool below_hyp = h * h < slow.h * slow.h + c2 * t * t;
        const bool in_a = v1 * v1 * (t - sa) * (t - sa) + h * h < la2;
        const bool in_b = v1 * v1 * (t - sb) * (t - sb) + h * h < lb2;
        hit += (below_hyp && !in_a && !in_b) ? 1 : 0;
    }
    const double p = static_cast<double>(hit) / n;
    const double mc = (tb - ta) * hmax * p;
    const double se = (tb - ta) * hmax * std::sqrt(p * (1 - p) / n);
    EXPECT_NEAR(exact, mc, 5.0 * se + 1e-9);
    EXPECT_THROW(hyperbola_extra_area(slow, 2.0, sa, sb, 1.0), DomainError);
}

TEST(Geometry, GaussianTailIntegralMatchesQuadrature) {
    for (auto [a, b] : {std::pair{1.0, 0.0}, {2.0, 0.3}, {0.5, 1.5}}) {
        double sum = 0.0;
        const int n = 200000;
        const double hi = 12.0, dx = hi / n;
        for (int i = 0; i < n; ++i) {
            const double x = (i + 0.5) * dx;
            sum += std::exp(-a * x * x - b / (x * x)) * dx;
        }
        EXPECT_NEAR(gaussian_tail_integral(a, b), sum, 1e-8);
    }
    EXPECT_THROW(gaussian_tail_integral(0.0, 1.0), DomainError);
}

TEST(Geometry, HeadFromStationIsClosestApproach) {
    Rng rng(16);
    const auto stations = sample_planar_stations(20.0, 2.0, DirectionLaw{}, rng, 1.5);
    ASSERT_GT(stations.size(), 100u);
    for (const auto& st : stations) {
        const HeadPoint hd = head_from_station(st, st.v);
        auto dist = [&](double t) {
            return std::hypot(st.x + st.v * t * std::cos(st.theta), st.y + st.v * t * std::sin(st.theta));
        };
        EXPECT_NEAR(dist(hd.t), hd.h, 1e-12);
        EXPECT_GE(hd.h, 0.0);
        EXPECT_LE(hd.h, dist(hd.t + 1e-3));
        EXPECT_LE(hd.h, dist(hd.t - 1e-3));
        // Distance trajectory is the bird curve.
        EXPECT_NEAR(dist(hd.t + 0.7), bird_height({hd, st.v}, hd.t + 0.7), 1e-12);
    }
}

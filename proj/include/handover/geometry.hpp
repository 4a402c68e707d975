#pragma once

#include <optional>
#include <vector>

namespace handover {

struct SpeedClass {
    int index = 1;       // 1-based, fastest class first
    double v = 1.0;
    double lambda = 1.0;
};

// Time of closest approach (t) and the distance at that time (h).
struct HeadPoint {
    double t = 0.0;
    double h = 0.0;
    int cls = 1;
};

// Distance trajectory sqrt(v^2 (t - T)^2 + H^2) of one station.
struct RadialBird {
    HeadPoint head;
    double v = 1.0;
};

struct PlanarStation {
    double R = 0.0;      // distance to the user at time 0
    double alpha = 0.0;  // direction of motion relative to the position angle, in [-pi, pi)
    int cls = 1;
    double x = 0.0, y = 0.0;
    double theta = 0.0;  // absolute direction of motion
    double v = 1.0;
};

// Open region {h >= 0, v^2 (t - s)^2 + h^2 < u^2}.
struct HalfEllipseRegion {
    double s = 0.0;
    double u = 1.0;
    double v = 1.0;
};

enum class IntersectionKind { unique, first, second, tangent };

struct Intersection {
    double s = 0.0;
    double h = 0.0;
    IntersectionKind kind = IntersectionKind::unique;
};

double bird_height(const RadialBird& bird, double t);
double bird_height_sq(const RadialBird& bird, double t);

HeadPoint head_from_station(const PlanarStation& st, double v);

// Throws EqualAbscissa when the heads are vertically aligned.
Intersection intersect_same_speed(const RadialBird& b1, const RadialBird& b2);

double mixed_discriminant(double t1, double h1, double t2, double h2, double v1, double v2);
double critical_offset(double h1, double h2, double v1, double v2);

// Zero, one (tangent) or two intersections, ordered in time.
std::vector<Intersection> intersect_mixed(const RadialBird& fast, const RadialBird& slow);

// Time at which `other` drops below `serving`: the root of
// h_other^2 - h_serving^2 where it changes sign from + to -. A pair of
// birds has at most one such root; tangencies do not count.
std::optional<double> down_crossing(const RadialBird& serving, const RadialBird& other);

bool region_contains(const HalfEllipseRegion& region, const HeadPoint& p);

double half_ball_union_area(double s, double h, double s2, double h2);
double half_ellipse_union_area(double s1, double l1, double s2, double l2, double v);

// Area between the hyperbola h^2 - c^2 (t - t2)^2 = h2^2, c^2 = v1^2 v2^2 / (v1^2 - v2^2),
// and the two fast half-ellipses hanging from the slow bird at s_a and s_b,
// restricted to the time span of their tangent fast heads.
double hyperbola_extra_area(const HeadPoint& slow_head, double v2, double s_a, double s_b,
                            double v1);

// Integral over (0, inf) of exp(-a x^2 - b / x^2).
double gaussian_tail_integral(double a, double b);

// F1 and F2 from the half-ball union formula.
double union_f1(double h1, double h, double h2);
double union_f2(double h1, double h, double h2);

} // namespace handover

#include "handover/analytics.hpp"

#include <cmath>
#include <limits>
#include <random>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "handover/errors.hpp"
#include "handover/rng.hpp"
#include "handover/stats.hpp"

namespace handover {

namespace {

constexpr double pi = 3.14159265358979323846;
constexpr double inf = std::numeric_limits<double>::infinity();

double sq(double x) { return x * x; }

// Offset from the fast head to the k-th crossing, in time units.
double crossing_offset(int k, double v1, double v2, double t, double h1, double h2,
                       Orientation orientation) {
    const double a = sq(v1) - sq(v2);
    const double delta = std::max(0.0, sq(v1) * sq(v2) * sq(t) - (sq(h1) - sq(h2)) * a);
    const double root = std::sqrt(delta);
    const double near_den = sq(v2) * t + root;
    if (orientation == Orientation::slow_left) {
        if (k == 1) return near_den > 0.0 ? (sq(h1) - sq(h2) - sq(v2) * sq(t)) / near_den : 0.0;
        return near_den / a;
    }
    if (k == 1) return -near_den / a;
    return near_den > 0.0 ? (sq(v2) * sq(t) - sq(h1) + sq(h2)) / near_den : 0.0;
}

} // namespace

double handover_frequency_single(double lambda, double v) {
    return 4.0 * v * std::sqrt(lambda) / pi;
}

double pure_frequency(double lambda_l, double lambda_total, double v_l) {
    if (!(lambda_total > 0.0)) return 0.0;
    return handover_frequency_single(lambda_total, v_l) * sq(lambda_l / lambda_total);
}

double visible_head_intensity(double lambda, double v) { return v * std::sqrt(lambda); }

QuadResult mixed_pair_integral(int k, double v1, double v2, double lambda_total, double gamma,
                               Orientation orientation) {
    if (!(v1 > v2)) throw DomainError("mixed pair integral needs v_fast > v_slow");
    if (k != 1 && k != 2) throw DomainError("crossing index must be 1 or 2");
    const double c = lambda_total * pi + gamma;
    const double tol = 1e-10;

    auto density = [&](double t, double h1, double h2) {
        const double x = crossing_offset(k, v1, v2, t, h1, h2, orientation);
        return std::exp(-c * (sq(v1 * x) + sq(h1)));
    };

    boost::math::quadrature::exp_sinh<double> outer_es, mid_es, inner_es;
    boost::math::quadrature::tanh_sinh<double> mid_ts;

    // Slow head lower than the fast one: crossings need |t| >= t*.
    auto below = [&](double h1) {
        auto over_h2 = [&](double h2) {
            const double tstar = critical_offset(h1, h2, v1, v2);
            return inner_es.integrate([&](double x) { return density(tstar + x, h1, h2); }, 0.0,
                                      inf, tol);
        };
        if (h1 <= 0.0) return 0.0;
        return mid_ts.integrate(over_h2, 0.0, h1, tol);
    };
    // Slow head higher: the pair always crosses twice.
    auto above = [&](double h1) {
        auto over_h2 = [&](double y) {
            const double h2 = h1 + y;
            return inner_es.integrate([&](double t) { return density(t, h1, h2); }, 0.0, inf,
                                      tol);
        };
        return mid_es.integrate(over_h2, 0.0, inf, tol);
    };

    double err = 0.0, l1 = 0.0;
    const double value = outer_es.integrate([&](double h1) { return below(h1) + above(h1); }, 0.0,
                                            inf, 1e-9, &err, &l1);
    if (!std::isfinite(value) || err > 1e-6 * std::max(std::abs(value), 1e-300))
        throw QuadratureFailure("mixed pair integral did not converge");
    return {value, err};
}

QuadResult mixed_frequency(int k, const SpeedClass& fast, const SpeedClass& slow,
                           double lambda_total, Orientation orientation) {
    const double pre = 4.0 * fast.lambda * slow.lambda * fast.v * slow.v;
    if (pre == 0.0) return {0.0, 0.0};
    const auto q = mixed_pair_integral(k, fast.v, slow.v, lambda_total, 0.0, orientation);
    return {pre * q.value, pre * q.error};
}

FrequencyBreakdown frequency_breakdown(const std::vector<SpeedClass>& classes) {
    FrequencyBreakdown out;
    double lambda = 0.0;
    for (const auto& c : classes) lambda += c.lambda;
    double total = 0.0, err = 0.0;
    for (const auto& c : classes) {
        out.pure.push_back(pure_frequency(c.lambda, lambda, c.v));
        total += out.pure.back();
    }
    for (std::size_t i = 0; i < classes.size(); ++i) {
        for (std::size_t j = i + 1; j < classes.size(); ++j) {
            for (int k = 1; k <= 2; ++k) {
                const auto m = mixed_frequency(k, classes[i], classes[j], lambda);
                out.mixed.push_back(m);
                out.mixed_labels.push_back("k=" + std::to_string(k) + " left="
                                           + std::to_string(classes[j].index) + " right="
                                           + std::to_string(classes[i].index));
                total += 2.0 * m.value;
                err += 2.0 * m.error;
            }
        }
    }
    out.total = {total, err};
    return out;
}

QuadResult total_frequency(const std::vector<SpeedClass>& classes) {
    return frequency_breakdown(classes).total;
}

double PalmLaw::pdf(double x) const {
    if (x < 0.0) return 0.0;
    const double c = lambda * pi;
    switch (kind) {
    case LawKind::handover_distance:
        return 4.0 * pi * std::pow(lambda, 1.5) * sq(x) * std::exp(-c * sq(x));
    case LawKind::visible_head_distance:
        return 2.0 * std::sqrt(lambda) * std::exp(-c * sq(x));
    case LawKind::typical_time_distance:
        return 2.0 * c * x * std::exp(-c * sq(x));
    case LawKind::handover_distance_squared:
        return std::pow(c, 1.5) * std::sqrt(x) * std::exp(-c * x) / boost::math::tgamma(1.5);
    }
    return 0.0;
}

double PalmLaw::cdf(double x) const {
    if (x <= 0.0) return 0.0;
    const double c = lambda * pi;
    switch (kind) {
    case LawKind::handover_distance:
        return boost::math::gamma_p(1.5, c * sq(x));
    case LawKind::visible_head_distance:
        return boost::math::erf(std::sqrt(c) * x);
    case LawKind::typical_time_distance:
        return -std::expm1(-c * sq(x));
    case LawKind::handover_distance_squared:
        return boost::math::gamma_p(1.5, c * x);
    }
    return 0.0;
}

double PalmLaw::laplace(double gamma) const {
    if (kind == LawKind::handover_distance_squared)
        return std::pow(1.0 + gamma / (lambda * pi), -1.5);
    boost::math::quadrature::exp_sinh<double> es;
    return es.integrate([&](double x) { return std::exp(-gamma * x) * pdf(x); }, 0.0, inf, 1e-12);
}

double PalmLaw::mean() const {
    switch (kind) {
    case LawKind::handover_distance:
        return 2.0 / (pi * std::sqrt(lambda));
    case LawKind::visible_head_distance:
        return 1.0 / (pi * std::sqrt(lambda));
    case LawKind::typical_time_distance:
        return 1.0 / (2.0 * std::sqrt(lambda));
    case LawKind::handover_distance_squared:
        return 1.5 / (lambda * pi);
    }
    return 0.0;
}

PalmLaw palm_law(const std::string& name, double lambda) {
    if (!(lambda > 0.0)) throw DomainError("palm_law needs lambda > 0");
    PalmLaw law;
    law.name = name;
    law.lambda = lambda;
    if (name == "handover_distance") law.kind = LawKind::handover_distance;
    else if (name == "visible_head_distance") law.kind = LawKind::visible_head_distance;
    else if (name == "typical_time_distance") law.kind = LawKind::typical_time_distance;
    else if (name == "handover_distance_squared") law.kind = LawKind::handover_distance_squared;
    else throw UnknownLaw(name);
    return law;
}

std::vector<LaplaceOrderRow> laplace_order_check(double lambda, const std::vector<double>& gammas) {
    const auto hand = palm_law("handover_distance", lambda);
    const auto typ = palm_law("typical_time_distance", lambda);
    const auto vis = palm_law("visible_head_distance", lambda);
    std::vector<LaplaceOrderRow> rows;
    for (double g : gammas) {
        LaplaceOrderRow r;
        r.gamma = g;
        r.handover = hand.laplace(g);
        r.typical = typ.laplace(g);
        r.visible = vis.laplace(g);
        const double slack = 1e-12;
        r.holds = r.handover <= r.typical + slack && r.typical <= r.visible + slack;
        rows.push_back(r);
    }
    return rows;
}

namespace {

// Importance sampler over (h1, t2, h2, t3, h3): middle head at (0, h1),
// previous at (-t2, h2), next at (t3, h3). Proposals are half-normals whose
// precisions come from max(h^2, h1^2) >= h1^2/3 + h2^2/6 + h3^2/6
// + v^2 (t2^2 + t3^2)/24, which keeps the weights bounded.
template <typename F>
McResult inter_handover_mc(double lambda, double v, std::size_t n, std::uint64_t seed, F&& g) {
    if (!(lambda > 0.0) || !(v > 0.0)) throw DomainError("need lambda > 0 and v > 0");
    if (n < 2) throw InsufficientSamples("need at least two Monte Carlo samples");
    const double c = lambda * pi;
    const double prec[5] = {c / 3.0, c * sq(v) / 24.0, c / 6.0, c * sq(v) / 24.0, c / 6.0};
    double log_q_norm = 0.0;
    for (double p : prec) log_q_norm += std::log(2.0 * std::sqrt(p / pi));
    const double log_pre = std::log(2.0 * sq(v) * pi) + 2.5 * std::log(lambda);

    Rng rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    double mean = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double x[5];
        double quad = 0.0;
        for (int j = 0; j < 5; ++j) {
            x[j] = std::abs(normal(rng)) / std::sqrt(2.0 * prec[j]);
            quad += prec[j] * sq(x[j]);
        }
        const double h1 = x[0], t2 = x[1], h2 = x[2], t3 = x[3], h3 = x[4];
        double w = 0.0;
        if (t2 > 0.0 && t3 > 0.0) {
            const HeadPoint left{-t2, h2, 1}, mid{0.0, h1, 1}, right{t3, h3, 1};
            const auto a = intersect_same_speed(RadialBird{left, v}, RadialBird{mid, v});
            const auto b = intersect_same_speed(RadialBird{mid, v}, RadialBird{right, v});
            const HalfEllipseRegion first{a.s, a.h, v};
            if (!region_contains(first, right) && b.s > a.s) {
                const double area = half_ellipse_union_area(a.s, a.h, b.s, b.h, v);
                const double log_f = log_pre - 2.0 * v * lambda * area;
                w = std::exp(log_f - (log_q_norm - quad)) * g(b.s - a.s);
            }
        }
        const double d = w - mean;
        mean += d / static_cast<double>(i + 1);
        m2 += d * (w - mean);
    }
    const double var = m2 / static_cast<double>(n - 1);
    return {mean, std::sqrt(var / static_cast<double>(n)), n};
}

} // namespace

McResult laplace_T_single(double rho, double lambda, double v, std::size_t mc_samples,
                          std::uint64_t seed) {
    if (rho < 0.0) throw DomainError("rho must be non-negative");
    return inter_handover_mc(lambda, v, mc_samples, seed,
                             [rho](double dt) { return std::exp(-rho * dt); });
}

McResult laplace_T_single_slope(double rho, double lambda, double v, std::size_t mc_samples,
                                std::uint64_t seed) {
    if (!(rho > 0.0)) throw DomainError("rho must be positive");
    return inter_handover_mc(lambda, v, mc_samples, seed,
                             [rho](double dt) { return -std::expm1(-rho * dt) / rho; });
}

SelfTestReport identity_selftests() {
    SelfTestReport r;
    boost::math::quadrature::exp_sinh<double> outer, inner;
    // Integral of exp(-max(x^2, y^2)) over the positive quadrant.
    r.max_identity = outer.integrate(
        [&](double x) {
            const double flat = x * std::exp(-x * x);
            const double tail = inner.integrate([](double y) { return std::exp(-y * y); }, x, inf,
                                                1e-13);
            return flat + tail;
        },
        0.0, inf, 1e-12);
    r.gaussian_closed = gaussian_tail_integral(1.0, 1.0);
    r.gaussian_quadrature = outer.integrate(
        [](double x) { return x > 0.0 ? std::exp(-x * x - 1.0 / (x * x)) : 0.0; }, 0.0, inf,
        1e-13);
    r.gaussian_zero_b = gaussian_tail_integral(1.0, 0.0);
    r.pass = std::abs(r.max_identity - 1.0) < 1e-6
             && std::abs(r.gaussian_closed - r.gaussian_quadrature) < 1e-6
             && std::abs(r.gaussian_zero_b - std::sqrt(pi) / 2.0) < 1e-12;
    return r;
}

QuadResult mixed_H2_laplace(double gamma, const std::vector<SpeedClass>& classes) {
    if (classes.size() != 2) throw DomainError("mixed_H2_laplace needs exactly two classes");
    if (gamma < 0.0) throw DomainError("gamma must be non-negative");
    const auto& f = classes[0].v > classes[1].v ? classes[0] : classes[1];
    const auto& s = classes[0].v > classes[1].v ? classes[1] : classes[0];
    const double lambda = f.lambda + s.lambda;
    const double pre = 4.0 * f.lambda * s.lambda * f.v * s.v;
    const double pure = pure_frequency(f.lambda, lambda, f.v) + pure_frequency(s.lambda, lambda, s.v);

    double mixed0 = 0.0, mixed_g = 0.0, err = 0.0;
    if (pre > 0.0) {
        for (int k = 1; k <= 2; ++k) {
            const auto a = mixed_pair_integral(k, f.v, s.v, lambda, 0.0);
            const auto b = gamma == 0.0 ? a : mixed_pair_integral(k, f.v, s.v, lambda, gamma);
            mixed0 += pre * a.value;
            mixed_g += pre * b.value;
            err += 2.0 * pre * (a.error + b.error);
        }
    }
    const double rate = pure + 2.0 * mixed0;
    const double value = (pure * std::pow(1.0 + gamma / (lambda * pi), -1.5) + 2.0 * mixed_g) / rate;
    return {value, err / rate};
}

} // namespace handover

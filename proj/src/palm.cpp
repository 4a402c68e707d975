#include "handover/palm.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "handover/errors.hpp"
#include "handover/rng.hpp"

namespace handover {

namespace {

constexpr double pi = 3.14159265358979323846;

double sq(double x) { return x * x; }

bool same_head(const HeadPoint& a, const HeadPoint& b) {
    return a.t == b.t && a.h == b.h && a.cls == b.cls;
}

// Ratio estimator sum(c) / sum(T) with its standard error from the
// replica-to-replica spread. Falls back to the Poisson error with a
// single replica.
Estimate ratio_estimate(const std::string& name, const std::vector<double>& counts,
                        const std::vector<double>& times) {
    Estimate e;
    e.name = name;
    double c = 0.0, t = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        c += counts[i];
        t += times[i];
    }
    e.count = static_cast<std::size_t>(c);
    if (!(t > 0.0)) return e;
    e.value = c / t;
    const std::size_t r = counts.size();
    if (r >= 2) {
        double ss = 0.0;
        for (std::size_t i = 0; i < r; ++i) ss += sq(counts[i] - e.value * times[i]);
        e.se = std::sqrt(ss * static_cast<double>(r) / static_cast<double>(r - 1)) / t;
    } else {
        e.se = std::sqrt(c) / t;
    }
    const auto ci = stats::normal_ci(e.value, e.se);
    e.ci_lo = ci.lo;
    e.ci_hi = ci.hi;
    return e;
}

} // namespace

std::vector<HandoverType> enumerate_types(int n_classes) {
    std::vector<HandoverType> out;
    for (int i = 1; i <= n_classes; ++i) out.push_back({1, i, i});
    for (int q = 1; q <= 2; ++q)
        for (int i = 1; i <= n_classes; ++i)
            for (int j = 1; j <= n_classes; ++j)
                if (i != j) out.push_back({q, i, j});
    return out;
}

int type_index(const std::vector<HandoverType>& list, const HandoverType& type) {
    for (std::size_t i = 0; i < list.size(); ++i)
        if (list[i] == type) return static_cast<int>(i);
    return -1;
}

double envelope_height(const std::vector<EnvelopeSegment>& segments, const ScenarioConfig& config,
                       double t) {
    if (segments.empty()) throw EmptyRealization();
    auto it = std::upper_bound(segments.begin(), segments.end(), t,
                               [](double x, const EnvelopeSegment& s) { return x < s.t_from; });
    if (it != segments.begin()) --it;
    return bird_height({it->serving, config.speed_of(it->serving.cls)}, t);
}

PalmSampleSet collect(const std::vector<ReplicaOutput>& replicas, double typical_spacing) {
    PalmSampleSet set;
    if (replicas.empty()) throw NoEvents();
    const ScenarioConfig& cfg = replicas.front().real.config;
    const int n_classes = static_cast<int>(cfg.classes.size());
    set.classes = cfg.classes;
    set.type_list = enumerate_types(n_classes);
    const std::size_t nt = set.type_list.size();
    set.transition_counts.assign(nt, std::vector<std::size_t>(nt, 0));
    if (!(typical_spacing > 0.0))
        typical_spacing = 4.0 / (cfg.min_speed() * std::sqrt(cfg.total_lambda()));

    std::size_t total_events = 0;
    for (const auto& rep : replicas) {
        const double guard = rep.real.window.guard;
        const double lo = cfg.t_start + guard;
        const double hi = cfg.t_end - guard;
        const double span = std::max(0.0, hi - lo);
        set.replica_time.push_back(span);
        ++set.replicas;
        set.interior_time += span;

        std::vector<std::size_t> type_counts(nt, 0);
        std::size_t events = 0;
        const HandoverEvent* last = nullptr;
        int last_type = -1;
        for (const auto& ev : rep.events) {
            if (ev.boundary) continue;
            const int ti = type_index(set.type_list, ev.type);
            set.handover_distances.push_back(ev.h);
            set.event_types.push_back(ti);
            ++type_counts[static_cast<std::size_t>(ti)];
            ++events;
            if (last) {
                set.dwell_times.push_back(ev.s - last->s);
                set.dwell_types.push_back(last_type);
                ++set.transition_counts[static_cast<std::size_t>(last_type)]
                                       [static_cast<std::size_t>(ti)];
            }
            last = &ev;
            last_type = ti;
        }
        set.replica_events.push_back(events);
        set.replica_type_counts.push_back(type_counts);
        total_events += events;

        auto heads = visible_heads(rep.segments);
        std::sort(heads.begin(), heads.end(), [](const HeadPoint& a, const HeadPoint& b) {
            return std::tie(a.t, a.h, a.cls) < std::tie(b.t, b.h, b.cls);
        });
        heads.erase(std::unique(heads.begin(), heads.end(), same_head), heads.end());
        std::size_t visible = 0;
        for (const auto& hd : heads) {
            if (hd.t < lo || hd.t >= hi) continue;
            set.visible_heights.push_back(hd.h);
            ++visible;
        }
        set.replica_visible.push_back(visible);

        if (span > 0.0 && !rep.segments.empty()) {
            Rng rng = Rng(cfg.seed).split(rep.replica).split(1000);
            for (double t = lo + rng.uniform() * typical_spacing; t < hi; t += typical_spacing)
                set.typical_distances.push_back(envelope_height(rep.segments, cfg, t));
        }
    }
    if (total_events == 0) throw NoEvents();
    return set;
}

const Estimate* EstimateReport::find(const std::string& name) const {
    for (const auto& e : estimates)
        if (e.name == name) return &e;
    return nullptr;
}

const stats::TestResult* EstimateReport::find_test(const std::string& name) const {
    for (const auto& t : tests)
        if (t.name == name) return &t;
    return nullptr;
}

double analytic_type_frequency(const HandoverType& type, const std::vector<SpeedClass>& classes) {
    double lambda = 0.0;
    for (const auto& c : classes) lambda += c.lambda;
    auto cls = [&](int index) -> const SpeedClass& {
        for (const auto& c : classes)
            if (c.index == index) return c;
        throw DomainError("unknown class index");
    };
    if (type.tau_p == type.tau_n) {
        const auto& c = cls(type.tau_p);
        return pure_frequency(c.lambda, lambda, c.v);
    }
    const OldNotation old = to_old_notation(type);
    const SpeedClass& left = cls(old.l);
    const SpeedClass& right = cls(old.r);
    const bool left_slow = left.v < right.v;
    const SpeedClass& fast = left_slow ? right : left;
    const SpeedClass& slow = left_slow ? left : right;
    return mixed_frequency(old.k, fast, slow, lambda,
                           left_slow ? Orientation::slow_left : Orientation::fast_left)
        .value;
}

EstimateReport estimate_rates(const PalmSampleSet& set, double total_time) {
    if (!(total_time > 0.0)) throw DomainError("total_time must be positive");
    EstimateReport rep;
    // Rescale per-replica exposures so that they sum to total_time.
    std::vector<double> times = set.replica_time;
    const double scale = set.interior_time > 0.0 ? total_time / set.interior_time : 1.0;
    for (auto& t : times) t *= scale;

    std::vector<double> counts;
    for (auto c : set.replica_events) counts.push_back(static_cast<double>(c));
    auto total = ratio_estimate("lambda_V", counts, times);
    total.analytic = total_frequency(set.classes).value;
    rep.estimates.push_back(total);

    counts.clear();
    for (auto c : set.replica_visible) counts.push_back(static_cast<double>(c));
    auto vis = ratio_estimate("visible_rate", counts, times);
    // A head is visible when it serves at its own abscissa.
    double vis_analytic = 0.0, lambda = 0.0;
    for (const auto& c : set.classes) {
        vis_analytic += c.v * c.lambda;
        lambda += c.lambda;
    }
    vis.analytic = lambda > 0.0 ? vis_analytic / std::sqrt(lambda) : 0.0;
    rep.estimates.push_back(vis);

    for (std::size_t k = 0; k < set.type_list.size(); ++k) {
        counts.clear();
        for (const auto& row : set.replica_type_counts) counts.push_back(static_cast<double>(row[k]));
        auto e = ratio_estimate("type" + type_label(set.type_list[k]), counts, times);
        e.analytic = analytic_type_frequency(set.type_list[k], set.classes);
        rep.estimates.push_back(e);
    }

    // Time reversal maps [q;i,j] onto [q;j,i].
    auto count_of = [&](const HandoverType& t) {
        const auto* e = rep.find("type" + type_label(t));
        return e ? e->count : std::size_t{0};
    };
    const int n = static_cast<int>(set.classes.size());
    for (int q = 1; q <= 2; ++q)
        for (int i = 1; i <= n; ++i)
            for (int j = i + 1; j <= n; ++j) {
                const HandoverType a{q, i, j}, b{q, j, i};
                if (count_of(a) + count_of(b) == 0) continue;
                auto t = stats::two_proportion(count_of(a), count_of(b));
                t.name = "reversal" + type_label(a) + type_label(b);
                rep.tests.push_back(t);
            }
    return rep;
}

EstimateReport gof_tests(const PalmSampleSet& set, double lambda) {
    constexpr std::size_t min_n = 1000;
    EstimateReport rep;
    if (set.handover_distances.size() < min_n || set.visible_heights.size() < min_n
        || set.typical_distances.size() < min_n)
        throw InsufficientSamples("goodness-of-fit needs at least 1000 samples per law");
    const auto nak = palm_law("handover_distance", lambda);
    const auto vis = palm_law("visible_head_distance", lambda);
    const auto typ = palm_law("typical_time_distance", lambda);

    auto t1 = stats::ks_one_sample(set.handover_distances, [&](double x) { return nak.cdf(x); });
    t1.name = "handover_distance";
    auto t2 = stats::ks_one_sample(set.visible_heights, [&](double x) { return vis.cdf(x); });
    t2.name = "visible_head_distance";
    auto t3 = stats::ks_one_sample(set.typical_distances, [&](double x) { return typ.cdf(x); });
    t3.name = "typical_time_distance";
    rep.tests = {t1, t2, t3};

    auto mean_estimate = [](const std::string& name, const std::vector<double>& xs, double exact) {
        const auto s = stats::summarize(xs);
        Estimate e;
        e.name = name;
        e.value = s.mean;
        e.se = s.se();
        const auto ci = stats::normal_ci(e.value, e.se);
        e.ci_lo = ci.lo;
        e.ci_hi = ci.hi;
        e.analytic = exact;
        e.count = s.n;
        return e;
    };
    rep.estimates.push_back(mean_estimate("mean_handover_distance", set.handover_distances, nak.mean()));
    rep.estimates.push_back(mean_estimate("mean_visible_height", set.visible_heights, vis.mean()));
    rep.estimates.push_back(mean_estimate("mean_typical_distance", set.typical_distances, typ.mean()));
    return rep;
}

std::vector<McResult> empirical_laplace(const std::vector<double>& samples,
                                        const std::vector<double>& rho_grid) {
    if (samples.empty()) throw InsufficientSamples("empirical_laplace needs samples");
    std::vector<McResult> out;
    std::vector<double> vals(samples.size());
    for (double rho : rho_grid) {
        for (std::size_t i = 0; i < samples.size(); ++i) vals[i] = std::exp(-rho * samples[i]);
        const auto s = stats::summarize(vals);
        out.push_back({s.mean, s.n > 1 ? s.se() : 0.0, s.n});
    }
    return out;
}

InterferenceReport interference_check(const std::vector<ReplicaOutput>& replicas,
                                      const std::vector<double>& radii, std::size_t stride) {
    InterferenceReport rep;
    rep.radii = radii;
    if (radii.empty() || !std::is_sorted(radii.begin(), radii.end()) || radii.front() <= 0.0)
        throw DomainError("radii must be positive and increasing");
    rep.observed.assign(radii.size(), 0.0);
    rep.expected.assign(radii.size(), 0.0);

    for (const auto& r : replicas) {
        const auto& cfg = r.real.config;
        if (radii.back() > r.real.window.h_max)
            throw DomainError("radii grid exceeds the sampled height cap");
        const double lambda = cfg.total_lambda();
        std::size_t index = 0;
        for (const auto& ev : r.events) {
            if (ev.boundary || index++ % std::max<std::size_t>(stride, 1) != 0) continue;
            ++rep.events_used;
            double prev_r = 0.0;
            for (std::size_t k = 0; k < radii.size(); ++k) {
                const double a = std::max(ev.h, prev_r);
                const double b = std::max(ev.h, radii[k]);
                rep.expected[k] += lambda * pi * (sq(b) - sq(a));
                prev_r = radii[k];
            }
            for (const auto& hd : r.real.heads) {
                if (same_head(hd, ev.prev_head) || same_head(hd, ev.next_head)) continue;
                if (hd.h >= radii.back()) continue;
                const double d = bird_height({hd, cfg.speed_of(hd.cls)}, ev.s);
                if (d < ev.h || d >= radii.back()) continue;
                const auto k = static_cast<std::size_t>(
                    std::upper_bound(radii.begin(), radii.end(), d) - radii.begin());
                rep.observed[k] += 1.0;
            }
        }
    }
    if (rep.events_used < 1000)
        throw InsufficientSamples("interference check needs at least 1000 events");
    rep.test = stats::chi_square_independent(rep.observed, rep.expected);
    rep.test.name = "interference";
    return rep;
}

std::vector<std::vector<int>> two_speed_transition_table() {
    return {{1, 0, 1, 0, 1, 0}, {0, 1, 0, 1, 0, 1}, {0, 1, 0, 1, 0, 1},
            {1, 0, 1, 0, 1, 0}, {0, 1, 0, 1, 0, 0}, {1, 0, 1, 0, 0, 0}};
}

TransitionReport transition_support(const PalmSampleSet& set) {
    TransitionReport rep;
    rep.counts = set.transition_counts;
    for (const auto& row : rep.counts)
        for (auto c : row) rep.pairs += c;
    if (rep.pairs < 10000)
        throw InsufficientSamples("transition support needs at least 10^4 event pairs");
    const std::size_t n = rep.counts.size();
    if (set.classes.size() == 2) {
        rep.table = two_speed_transition_table();
    } else if (set.classes.size() == 1) {
        rep.table = {{1}};
    } else {
        throw DomainError("transition table is defined for one or two classes");
    }
    rep.forbidden_absent = true;
    rep.allowed_present = true;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (rep.table[i][j] == 0 && rep.counts[i][j] > 0) rep.forbidden_absent = false;
            if (rep.table[i][j] == 1 && rep.counts[i][j] == 0) rep.allowed_present = false;
        }
    return rep;
}

} // namespace handover

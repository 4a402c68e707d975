#include "handover/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

#include "handover/analytics.hpp"
#include "handover/errors.hpp"
#include "handover/markov.hpp"
#include "handover/palm.hpp"
#include "handover/validation.hpp"

namespace handover::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double pi = 3.14159265358979323846;

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write " + path.string());
    return f;
}

void write_json(const fs::path& path, const json& j) {
    auto f = open_out(path);
    f << j.dump(2) << '\n';
    if (!f) throw IoError("write failed: " + path.string());
}

double elapsed(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

json estimate_json(const Estimate& e) {
    json j{{"name", e.name}, {"value", e.value}, {"se", e.se},
           {"ci", {e.ci_lo, e.ci_hi}}, {"count", e.count}};
    j["analytic"] = std::isnan(e.analytic) ? json(nullptr) : json(e.analytic);
    return j;
}

json test_json(const stats::TestResult& t) {
    return {{"name", t.name}, {"statistic", t.statistic}, {"p_value", t.p_value}, {"n", t.n}};
}

std::string type_file_tag(const HandoverType& t) {
    return "q" + std::to_string(t.q) + "_p" + std::to_string(t.tau_p) + "_n" + std::to_string(t.tau_n);
}

std::vector<ReplicaOutput> run_replicas(const ScenarioConfig& cfg, const Options& opt,
                                        RunManifest& manifest) {
    if (opt.replicas == 0) throw ConfigError("replicas must be at least 1");
    auto reps = simulate_replicas(cfg, opt.replicas, opt.threads);
    manifest.replicas = reps.size();
    for (const auto& r : reps) manifest.retries += static_cast<std::size_t>(r.retries);
    return reps;
}

} // namespace

ScenarioConfig config_from_json(const json& j) {
    ScenarioConfig c;
    try {
        if (j.contains("classes")) {
            std::vector<SpeedClass> classes;
            for (const auto& e : j.at("classes"))
                classes.push_back({0, e.at("v").get<double>(), e.at("lambda").get<double>()});
            std::stable_sort(classes.begin(), classes.end(),
                             [](const SpeedClass& a, const SpeedClass& b) { return a.v > b.v; });
            for (std::size_t i = 0; i < classes.size(); ++i) classes[i].index = static_cast<int>(i) + 1;
            c.classes = classes;
        }
        if (j.contains("window")) {
            const auto w = j.at("window").get<std::vector<double>>();
            if (w.size() != 2) throw ConfigError("window needs two numbers");
            c.t_start = w[0];
            c.t_end = w[1];
        }
        if (j.contains("epsilon")) c.epsilon = j.at("epsilon").get<double>();
        if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("direction_law")) {
            const auto& d = j.at("direction_law");
            const std::string kind = d.is_string() ? d.get<std::string>() : d.at("kind").get<std::string>();
            if (kind == "uniform") {
                c.direction_law = {};
            } else if (kind == "fixed") {
                c.direction_law.kind = DirectionLaw::Kind::fixed;
                c.direction_law.theta = d.is_object() && d.contains("theta") ? d.at("theta").get<double>() : 0.0;
            } else {
                throw ConfigError("unknown direction_law: " + kind);
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad config: ") + e.what());
    }
    return c;
}

json config_to_json(const ScenarioConfig& c) {
    json classes = json::array();
    for (const auto& k : c.classes) classes.push_back({{"index", k.index}, {"v", k.v}, {"lambda", k.lambda}});
    json law = c.direction_law.kind == DirectionLaw::Kind::uniform
                   ? json("uniform")
                   : json{{"kind", "fixed"}, {"theta", c.direction_law.theta}};
    return {{"classes", classes}, {"window", {c.t_start, c.t_end}}, {"epsilon", c.epsilon},
            {"direction_law", law}, {"seed", c.seed}};
}

ScenarioConfig resolve_config(const Options& opt) {
    ScenarioConfig c = single_speed_config(1.0, 1.0, 0.0, 100.0, 1);
    if (opt.config_path) {
        std::ifstream f(*opt.config_path);
        if (!f) throw ConfigError("cannot read config " + *opt.config_path);
        json j;
        try {
            f >> j;
        } catch (const json::exception& e) {
            throw ConfigError(std::string("config is not valid JSON: ") + e.what());
        }
        const ScenarioConfig base = c;
        c = config_from_json(j);
        if (c.classes.empty()) c.classes = base.classes;
    }
    if (opt.lambda || opt.v) {
        if (c.classes.size() != 1 && opt.config_path)
            throw ConfigError("--lambda/--v apply to single-class scenarios only");
        c.classes = {SpeedClass{1, opt.v.value_or(c.classes.front().v),
                                opt.lambda.value_or(c.classes.front().lambda)}};
    }
    if (opt.seed) c.seed = *opt.seed;
    if (opt.window) {
        if (opt.window->size() != 2) throw ConfigError("--window needs two numbers");
        c.t_start = (*opt.window)[0];
        c.t_end = (*opt.window)[1];
    }
    if (opt.epsilon) c.epsilon = *opt.epsilon;
    c.validate();
    return c;
}

void write_events_csv(const fs::path& path, const std::vector<ReplicaOutput>& reps) {
    std::vector<EventRow> rows;
    for (const auto& r : reps)
        for (const auto& e : r.events) rows.push_back({r.replica, e});
    std::stable_sort(rows.begin(), rows.end(), [](const EventRow& a, const EventRow& b) {
        return a.replica != b.replica ? a.replica < b.replica : a.event.s < b.event.s;
    });
    auto f = open_out(path);
    f << "replica,s,h,q,tau_p,tau_n,prev_t,prev_h,next_t,next_h,boundary\n";
    for (const auto& row : rows) {
        const auto& e = row.event;
        f << row.replica << ',' << fmt17(e.s) << ',' << fmt17(e.h) << ',' << e.type.q << ','
          << e.type.tau_p << ',' << e.type.tau_n << ',' << fmt17(e.prev_head.t) << ','
          << fmt17(e.prev_head.h) << ',' << fmt17(e.next_head.t) << ',' << fmt17(e.next_head.h)
          << ',' << (e.boundary ? 1 : 0) << '\n';
    }
    if (!f) throw IoError("write failed: " + path.string());
}

std::vector<EventRow> read_events_csv(const fs::path& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot read " + path.string());
    std::string line;
    std::getline(f, line);
    std::vector<EventRow> out;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
        if (cells.size() != 11) throw IoError("malformed events row: " + line);
        EventRow r;
        r.replica = std::stoull(cells[0]);
        auto& e = r.event;
        e.s = std::stod(cells[1]);
        e.h = std::stod(cells[2]);
        e.type = {std::stoi(cells[3]), std::stoi(cells[4]), std::stoi(cells[5])};
        e.prev_head = {std::stod(cells[6]), std::stod(cells[7]), e.type.tau_p};
        e.next_head = {std::stod(cells[8]), std::stod(cells[9]), e.type.tau_n};
        e.boundary = cells[10] == "1";
        out.push_back(r);
    }
    return out;
}

void write_histogram(const fs::path& path, const std::vector<double>& samples, std::size_t bins,
                     const std::function<double(double)>& pdf) {
    auto f = open_out(path);
    f << "bin_lo,bin_hi,count,density,analytic_pdf\n";
    if (samples.empty() || bins == 0) return;
    std::vector<double> sorted = samples;
    std::sort(sorted.begin(), sorted.end());
    const double hi_edge = sorted[static_cast<std::size_t>(0.999 * static_cast<double>(sorted.size() - 1))];
    const double lo = 0.0, width = std::max(hi_edge, 1e-12) / static_cast<double>(bins);
    std::vector<std::size_t> counts(bins, 0);
    for (double x : sorted) {
        const auto k = static_cast<std::size_t>((x - lo) / width);
        if (k < bins) ++counts[k];
    }
    const double n = static_cast<double>(samples.size());
    for (std::size_t k = 0; k < bins; ++k) {
        const double a = lo + width * static_cast<double>(k), b = a + width;
        f << fmt17(a) << ',' << fmt17(b) << ',' << counts[k] << ','
          << fmt17(static_cast<double>(counts[k]) / (n * width)) << ',';
        if (pdf) f << fmt17(pdf(0.5 * (a + b)));
        f << '\n';
    }
}

std::string sha256_file(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot read " + path.string());
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    char buf[1 << 16];
    while (f) {
        f.read(buf, sizeof buf);
        if (f.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(f.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, md, &len);
    EVP_MD_CTX_free(ctx);
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i)
        hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    return hex.str();
}

void write_manifest(const fs::path& out_dir, const RunManifest& m) {
    json outputs = json::array();
    for (const auto& p : m.outputs) {
        const auto full = out_dir / p;
        if (!fs::exists(full) || fs::file_size(full) == 0)
            throw IoError("output missing or empty: " + full.string());
        outputs.push_back({{"file", p.string()}, {"bytes", fs::file_size(full)},
                           {"sha256", sha256_file(full)}});
    }
    json j{{"tool", "handover_lab"},
           {"version", tool_version},
           {"subcommand", m.subcommand},
           {"config", config_to_json(m.config)},
           {"replicas", m.replicas},
           {"outputs", outputs},
           {"wall_clock_seconds", m.wall_clock},
           {"retries", m.retries},
           {"overflows", m.overflows}};
    for (auto it = m.extra.begin(); it != m.extra.end(); ++it) j[it.key()] = it.value();
    write_json(out_dir / "manifest.json", j);
}

int cmd_simulate(const Options& opt) {
    const auto start = std::chrono::steady_clock::now();
    RunManifest m;
    m.subcommand = "simulate";
    m.config = resolve_config(opt);
    ensure_dir(opt.out);
    const auto reps = run_replicas(m.config, opt, m);

    write_events_csv(opt.out / "events.csv", reps);
    json per = json::array();
    std::size_t events = 0, interior = 0;
    for (const auto& r : reps) {
        std::size_t in = 0;
        for (const auto& e : r.events) in += e.boundary ? 0 : 1;
        events += r.events.size();
        interior += in;
        per.push_back({{"replica", r.replica}, {"heads", r.real.heads.size()},
                       {"segments", r.segments.size()}, {"events", r.events.size()},
                       {"interior_events", in}, {"retries", r.retries},
                       {"h_max", r.real.window.h_max}, {"guard", r.real.window.guard}});
    }
    write_json(opt.out / "envelope_summary.json",
               {{"replicas", per}, {"events", events}, {"interior_events", interior}});
    m.outputs = {"events.csv", "envelope_summary.json"};
    m.wall_clock = elapsed(start);
    write_manifest(opt.out, m);
    return exit_ok;
}

int cmd_palm(const Options& opt) {
    const auto start = std::chrono::steady_clock::now();
    RunManifest m;
    m.subcommand = "palm";
    m.config = resolve_config(opt);
    ensure_dir(opt.out);
    const auto reps = run_replicas(m.config, opt, m);
    const auto set = collect(reps);
    const double lambda = m.config.total_lambda();

    json report;
    report["interior_time"] = set.interior_time;
    json rates = json::array(), tests = json::array();
    const auto est = estimate_rates(set, set.interior_time);
    for (const auto& e : est.estimates) rates.push_back(estimate_json(e));
    for (const auto& t : est.tests) tests.push_back(test_json(t));
    report["rates"] = rates;
    report["symmetry_tests"] = tests;

    try {
        const auto gof = gof_tests(set, lambda);
        json g = json::array(), means = json::array();
        for (const auto& t : gof.tests) g.push_back(test_json(t));
        for (const auto& e : gof.estimates) means.push_back(estimate_json(e));
        report["gof"] = {{"tests", g}, {"means", means}};
    } catch (const InsufficientSamples& e) {
        report["gof"] = {{"skipped", e.what()}};
    }

    const std::vector<double> rhos{0.05, 0.1, 0.2, 0.5, 1.0};
    json lap = json::array();
    const auto emp = empirical_laplace(set.dwell_times.empty() ? std::vector<double>{0.0} : set.dwell_times, rhos);
    for (std::size_t i = 0; i < rhos.size(); ++i) {
        json row{{"rho", rhos[i]}, {"empirical", emp[i].value}, {"se", emp[i].se}};
        if (m.config.classes.size() == 1) {
            const auto q = laplace_T_single(rhos[i], lambda, m.config.classes[0].v, 200000, m.config.seed);
            row["monte_carlo_quadrature"] = q.value;
            row["monte_carlo_se"] = q.se;
        }
        lap.push_back(row);
    }
    report["dwell_laplace"] = lap;

    try {
        const double r_max = reps.front().real.window.h_max;
        std::vector<double> radii;
        for (int k = 1; k <= 5; ++k) radii.push_back(r_max * 0.85 * k / 5.0);
        const auto inter = interference_check(reps, radii, 5);
        report["interference"] = {{"radii", inter.radii}, {"observed", inter.observed},
                                  {"expected", inter.expected}, {"events", inter.events_used},
                                  {"test", test_json(inter.test)}};
    } catch (const std::exception& e) {
        report["interference"] = {{"skipped", e.what()}};
    }

    try {
        const auto tr = transition_support(set);
        report["transitions"] = {{"counts", tr.counts}, {"table", tr.table},
                                 {"forbidden_absent", tr.forbidden_absent},
                                 {"allowed_present", tr.allowed_present}, {"pairs", tr.pairs}};
    } catch (const std::exception& e) {
        report["transitions"] = {{"counts", set.transition_counts}, {"skipped", e.what()}};
    }
    json labels = json::array();
    for (const auto& t : set.type_list) labels.push_back(type_label(t));
    report["type_labels"] = labels;
    write_json(opt.out / "palm_report.json", report);
    m.outputs = {"palm_report.json"};

    const auto nak = palm_law("handover_distance", lambda);
    const auto vis = palm_law("visible_head_distance", lambda);
    const auto typ = palm_law("typical_time_distance", lambda);
    auto hist = [&](const std::string& name, const std::vector<double>& xs,
                    const std::function<double(double)>& pdf) {
        if (xs.empty()) return;
        write_histogram(opt.out / name, xs, 50, pdf);
        m.outputs.push_back(name);
    };
    hist("hist_H.csv", set.handover_distances, [&](double x) { return nak.pdf(x); });
    if (set.type_list.size() > 1) {
        for (std::size_t k = 0; k < set.type_list.size(); ++k) {
            std::vector<double> xs;
            for (std::size_t i = 0; i < set.handover_distances.size(); ++i)
                if (set.event_types[i] == static_cast<int>(k)) xs.push_back(set.handover_distances[i]);
            hist("hist_H_" + type_file_tag(set.type_list[k]) + ".csv", xs, {});
        }
    }
    hist("hist_dwell.csv", set.dwell_times, {});
    hist("hist_visible.csv", set.visible_heights, [&](double x) { return vis.pdf(x); });
    hist("hist_typical.csv", set.typical_distances, [&](double x) { return typ.pdf(x); });

    m.wall_clock = elapsed(start);
    write_manifest(opt.out, m);
    return exit_ok;
}

int cmd_analytic(const Options& opt) {
    const auto start = std::chrono::steady_clock::now();
    RunManifest m;
    m.subcommand = "analytic";
    m.config = resolve_config(opt);
    ensure_dir(opt.out);
    const auto& classes = m.config.classes;
    const double lambda = m.config.total_lambda();
    json j;
    j["query"] = opt.query;
    if (opt.query == "frequency") {
        const auto br = frequency_breakdown(classes);
        j["lambda_V"] = br.total.value;
        j["quadrature_error"] = br.total.error;
        j["pure"] = br.pure;
        json mixed = json::array();
        for (std::size_t i = 0; i < br.mixed.size(); ++i)
            mixed.push_back({{"label", br.mixed_labels[i]}, {"value", br.mixed[i].value},
                             {"error", br.mixed[i].error}});
        j["mixed"] = mixed;
        if (classes.size() > 1) {
            json types = json::object();
            for (const auto& t : enumerate_types(static_cast<int>(classes.size())))
                types[type_label(t)] = analytic_type_frequency(t, classes);
            j["per_type"] = types;
        }
    } else if (opt.query == "laws") {
        json laws = json::array();
        for (const char* name : {"handover_distance", "visible_head_distance",
                                 "typical_time_distance", "handover_distance_squared"}) {
            const auto law = palm_law(name, lambda);
            json grid = json::array();
            for (int k = 0; k <= 40; ++k) {
                const double x = 0.05 * k / std::sqrt(lambda);
                grid.push_back({{"x", x}, {"pdf", law.pdf(x)}, {"cdf", law.cdf(x)}});
            }
            laws.push_back({{"name", name}, {"mean", law.mean()}, {"grid", grid}});
        }
        j["laws"] = laws;
    } else if (opt.query == "laplace_order") {
        json rows = json::array();
        for (const auto& r : laplace_order_check(lambda, {0.5, 1.0, 2.0, 5.0, 10.0}))
            rows.push_back({{"gamma", r.gamma}, {"handover", r.handover}, {"typical", r.typical},
                            {"visible", r.visible}, {"holds", r.holds}});
        j["rows"] = rows;
    } else if (opt.query == "laplace_T") {
        if (classes.size() != 1) throw ConfigError("laplace_T needs a single class");
        json rows = json::array();
        for (double rho : {0.0, 0.05, 0.1, 0.2, 0.5, 1.0}) {
            const auto q = laplace_T_single(rho, lambda, classes[0].v, 1'000'000, m.config.seed);
            rows.push_back({{"rho", rho}, {"value", q.value}, {"se", q.se}});
        }
        j["rows"] = rows;
    } else if (opt.query == "mixed_h2") {
        if (classes.size() != 2) throw ConfigError("mixed_h2 needs two classes");
        json rows = json::array();
        for (double g : {0.0, 0.5 * lambda * pi, lambda * pi, 2.0 * lambda * pi}) {
            const auto q = mixed_H2_laplace(g, classes);
            rows.push_back({{"gamma", g}, {"value", q.value}, {"error", q.error}});
        }
        j["rows"] = rows;
    } else if (opt.query == "selftest") {
        const auto s = identity_selftests();
        j["max_identity"] = s.max_identity;
        j["gaussian_closed"] = s.gaussian_closed;
        j["gaussian_quadrature"] = s.gaussian_quadrature;
        j["pass"] = s.pass;
    } else {
        throw ConfigError("unknown analytic query: " + opt.query);
    }
    write_json(opt.out / "analytic.json", j);
    m.outputs = {"analytic.json"};
    m.wall_clock = elapsed(start);
    write_manifest(opt.out, m);
    return exit_ok;
}

int cmd_markov(const Options& opt) {
    const auto start = std::chrono::steady_clock::now();
    RunManifest m;
    m.subcommand = "markov";
    m.config = resolve_config(opt);
    if (opt.steps == 0) throw ConfigError("steps must be at least 1");
    if (m.config.classes.size() > 2) throw ConfigError("markov supports one or two classes");
    ensure_dir(opt.out);
    Rng rng(m.config.seed);
    const auto chain = run_chain(opt.steps, m.config, rng, opt.burn_in);

    auto f = open_out(opt.out / "chain.csv");
    f << "step,h_l,t_r,h_r,q,tau_p,tau_n,dwell,distance,reappearance\n";
    for (std::size_t i = 0; i < chain.size(); ++i) {
        const auto& s = chain[i];
        const HandoverType t = s.state.type.value_or(HandoverType{1, 1, 1});
        f << i << ',' << fmt17(s.state.h_l) << ',' << fmt17(s.state.t_r) << ','
          << fmt17(s.state.h_r) << ',' << t.q << ',' << t.tau_p << ',' << t.tau_n << ','
          << fmt17(s.dwell) << ',' << fmt17(s.distance) << ',' << (s.reappearance ? 1 : 0) << '\n';
    }
    f.close();

    const auto types = enumerate_types(static_cast<int>(m.config.classes.size()));
    std::vector<std::vector<std::size_t>> counts(types.size(), std::vector<std::size_t>(types.size(), 0));
    for (std::size_t i = 1; i < chain.size(); ++i) {
        const auto a = type_index(types, chain[i - 1].state.type.value_or(HandoverType{1, 1, 1}));
        const auto b = type_index(types, chain[i].state.type.value_or(HandoverType{1, 1, 1}));
        ++counts[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
    }
    json probs = json::array();
    for (const auto& row : counts) {
        double tot = 0.0;
        for (auto c : row) tot += static_cast<double>(c);
        json pr = json::array();
        for (auto c : row) pr.push_back(tot > 0 ? static_cast<double>(c) / tot : 0.0);
        probs.push_back(pr);
    }
    json labels = json::array();
    for (const auto& t : types) labels.push_back(type_label(t));
    json tm{{"types", labels}, {"counts", counts}, {"probabilities", probs},
            {"burn_in_steps", opt.burn_in},
            {"initial_state", "first interior event of a direct simulation, then burn-in"}};
    if (m.config.classes.size() == 2) tm["allowed"] = two_speed_transition_table();
    write_json(opt.out / "transition_matrix.json", tm);
    m.outputs = {"chain.csv", "transition_matrix.json"};
    m.extra["steps"] = opt.steps;
    m.wall_clock = elapsed(start);
    write_manifest(opt.out, m);
    return exit_ok;
}

int cmd_validate(const Options& opt) {
    const auto start = std::chrono::steady_clock::now();
    if (opt.suite != "full") throw ConfigError("unknown suite: " + opt.suite);
    ensure_dir(opt.out);
    ValidationOptions vo;
    vo.seed = opt.seed.value_or(1);
    vo.threads = opt.threads;
    vo.only = opt.only;
    bool all = true;
    json rows = json::array();
    run_validation(vo, [&](const CriterionResult& r) {
        std::printf("%s\n", format_result(r).c_str());
        std::fflush(stdout);
        all = all && r.pass;
        json metrics = json::object();
        for (const auto& [k, v] : r.metrics) metrics[k] = v;
        rows.push_back({{"id", r.id}, {"title", r.title}, {"pass", r.pass},
                        {"metrics", metrics}, {"note", r.note}, {"seconds", r.seconds}});
    });
    write_json(opt.out / "validation.json", {{"suite", opt.suite}, {"seed", vo.seed},
                                             {"criteria", rows}, {"all_pass", all}});
    RunManifest m;
    m.subcommand = "validate";
    m.config = single_speed_config(1.0, 1.0, 0.0, 200.0, vo.seed);
    m.outputs = {"validation.json"};
    m.wall_clock = elapsed(start);
    write_manifest(opt.out, m);
    return all ? exit_ok : exit_validation;
}

} // namespace handover::cli

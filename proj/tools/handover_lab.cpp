// handover_lab: simulate | palm | analytic | markov | validate
#include <cstdio>
#include <cstdlib>
#include <string>

#include <CLI11.hpp>

#include "handover/cli.hpp"
#include "handover/errors.hpp"

using namespace handover;

int main(int argc, char** argv) {
    CLI::App app{"Handover statistics for moving stations"};
    app.require_subcommand(1);
    cli::Options opt;
    if (const char* env = std::getenv("HANDOVER_LAB_THREADS")) opt.threads = std::strtoul(env, nullptr, 10);

    std::string config_path;
    std::uint64_t seed = 0;
    std::vector<double> window;
    double epsilon = 0.0, lambda = 0.0, v = 0.0;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON scenario file")->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "Master seed");
        sub->add_option("--window", window, "Observation window t0 t1")->expected(2);
        sub->add_option("--out", opt.out, "Output directory");
        sub->add_option("--epsilon", epsilon, "Truncation error budget");
        sub->add_option("--threads", opt.threads, "Worker threads (0 = auto)");
        sub->add_option("--lambda", lambda, "Single-class intensity");
        sub->add_option("--v", v, "Single-class speed");
    };
    auto* sim = app.add_subcommand("simulate", "Simulate replicas and write events.csv");
    common(sim);
    sim->add_option("--replicas", opt.replicas, "Replica count");
    auto* palm = app.add_subcommand("palm", "Palm estimates and histograms");
    common(palm);
    palm->add_option("--replicas", opt.replicas, "Replica count");
    auto* analytic = app.add_subcommand("analytic", "Closed forms and quadratures");
    common(analytic);
    analytic->add_option("--query", opt.query,
                         "frequency | laws | laplace_order | laplace_T | mixed_h2 | selftest");
    auto* markov = app.add_subcommand("markov", "Run the handover Markov chain");
    common(markov);
    markov->add_option("--steps", opt.steps, "Chain length");
    markov->add_option("--burn-in", opt.burn_in, "Discarded initial steps");
    auto* validate = app.add_subcommand("validate", "Run the acceptance suite");
    common(validate);
    validate->add_option("--suite", opt.suite, "Suite name (full)");
    validate->add_option("--only", opt.only, "Run only these criteria");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : cli::exit_config;
    }
    auto given = [&](const char* name) {
        for (auto* sub : app.get_subcommands())
            if (sub->count(name) > 0) return true;
        return false;
    };
    if (given("--config")) opt.config_path = config_path;
    if (given("--seed")) opt.seed = seed;
    if (given("--window")) opt.window = window;
    if (given("--epsilon")) opt.epsilon = epsilon;
    if (given("--lambda")) opt.lambda = lambda;
    if (given("--v")) opt.v = v;

    try {
        if (sim->parsed()) return cli::cmd_simulate(opt);
        if (palm->parsed()) return cli::cmd_palm(opt);
        if (analytic->parsed()) return cli::cmd_analytic(opt);
        if (markov->parsed()) return cli::cmd_markov(opt);
        if (validate->parsed()) return cli::cmd_validate(opt);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return cli::exit_config;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return cli::exit_runtime;
    }
    return cli::exit_runtime;
}

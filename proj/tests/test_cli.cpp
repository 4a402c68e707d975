#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include "handover/cli.hpp"
#include "handover/errors.hpp"

using namespace handover;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("handover_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

int run_tool(const std::string& args) {
    const std::string cmd = std::string(HANDOVER_LAB_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST(Cli, ConfigFromJsonSortsAndNumbersClasses) {
    const auto j = nlohmann::json::parse(
        R"({"classes":[{"v":1,"lambda":0.3},{"v":2,"lambda":0.7}],"window":[5,50],
            "epsilon":0.01,"seed":9,"direction_law":{"kind":"fixed","theta":0.5}})");
    const auto c = cli::config_from_json(j);
    ASSERT_EQ(c.classes.size(), 2u);
    EXPECT_EQ(c.classes[0].index, 1);
    EXPECT_EQ(c.classes[0].v, 2.0);
    EXPECT_EQ(c.classes[1].lambda, 0.3);
    EXPECT_EQ(c.t_start, 5.0);
    EXPECT_EQ(c.seed, 9u);
    EXPECT_EQ(c.direction_law.kind, DirectionLaw::Kind::fixed);
    EXPECT_NO_THROW(c.validate());

    const auto back = cli::config_from_json(cli::config_to_json(c));
    EXPECT_EQ(back.classes[1].v, 1.0);
    EXPECT_EQ(back.direction_law.theta, 0.5);

    EXPECT_THROW(cli::config_from_json(nlohmann::json::parse(R"({"window":[1]})")), ConfigError);
    EXPECT_THROW(cli::config_from_json(nlohmann::json::parse(R"({"direction_law":"spiral"})")),
                 ConfigError);
    EXPECT_THROW(cli::config_from_json(nlohmann::json::parse(R"({"classes":[{"v":1}]})")), ConfigError);
}

TEST(Cli, ResolveConfigAppliesFlags) {
    cli::Options o;
    o.lambda = 2.0;
    o.v = 0.5;
    o.seed = 4;
    o.window = std::vector<double>{0.0, 20.0};
    const auto c = cli::resolve_config(o);
    EXPECT_EQ(c.classes[0].lambda, 2.0);
    EXPECT_EQ(c.classes[0].v, 0.5);
    EXPECT_EQ(c.seed, 4u);
    EXPECT_EQ(c.t_end, 20.0);
    o.window = std::vector<double>{3.0, 1.0};
    EXPECT_THROW(cli::resolve_config(o), ConfigError);
}

TEST(Cli, EventsCsvRoundTrip) {
    const auto dir = scratch("csv");
    const auto reps = simulate_replicas(single_speed_config(1.0, 1.0, 0.0, 30.0, 3), 2);
    cli::write_events_csv(dir / "events.csv", reps);
    const auto rows = cli::read_events_csv(dir / "events.csv");
    std::size_t k = 0;
    for (const auto& r : reps) {
        for (const auto& e : r.events) {
            ASSERT_LT(k, rows.size());
            EXPECT_EQ(rows[k].replica, r.replica);
            EXPECT_EQ(rows[k].event.s, e.s);  // %.17g is exact
            EXPECT_EQ(rows[k].event.h, e.h);
            EXPECT_EQ(rows[k].event.type, e.type);
            EXPECT_EQ(rows[k].event.next_head.t, e.next_head.t);
            EXPECT_EQ(rows[k].event.boundary, e.boundary);
            ++k;
        }
    }
    EXPECT_EQ(k, rows.size());
}

TEST(Cli, Sha256KnownVector) {
    const auto dir = scratch("sha");
    std::ofstream(dir / "abc.txt", std::ios::binary) << "abc";
    EXPECT_EQ(cli::sha256_file(dir / "abc.txt"),
              "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Cli, HistogramDensityIntegratesBelowOne) {
    const auto dir = scratch("hist");
    std::vector<double> xs;
    for (int i = 0; i < 1000; ++i) xs.push_back(i / 1000.0);
    cli::write_histogram(dir / "h.csv", xs, 10, [](double) { return 1.0; });
    std::ifstream f(dir / "h.csv");
    std::string line;
    std::getline(f, line);
    EXPECT_EQ(line, "bin_lo,bin_hi,count,density,analytic_pdf");
    double mass = 0.0;
    int rows = 0;
    while (std::getline(f, line)) {
        double lo, hi, count, dens;
        char c;
        std::stringstream ss(line);
        ss >> lo >> c >> hi >> c >> count >> c >> dens;
        mass += dens * (hi - lo);
        ++rows;
    }
    EXPECT_EQ(rows, 10);
    EXPECT_NEAR(mass, 1.0, 0.01);
}

TEST(Cli, SimulateIsDeterministicAndHashed) {
    const auto a = scratch("det_a"), b = scratch("det_b");
    ASSERT_EQ(run_tool("simulate --replicas 3 --window 0 40 --seed 5 --threads 1 --out " + a.string()), 0);
    ASSERT_EQ(run_tool("simulate --replicas 3 --window 0 40 --seed 5 --threads 2 --out " + b.string()), 0);
    EXPECT_EQ(slurp(a / "events.csv"), slurp(b / "events.csv"));
    EXPECT_EQ(slurp(a / "envelope_summary.json"), slurp(b / "envelope_summary.json"));

    const auto manifest = nlohmann::json::parse(slurp(a / "manifest.json"));
    EXPECT_EQ(manifest["subcommand"], "simulate");
    EXPECT_EQ(manifest["replicas"], 3);
    for (const auto& out : manifest["outputs"])
        EXPECT_EQ(out["sha256"].get<std::string>(), cli::sha256_file(a / out["file"].get<std::string>()));
}

TEST(Cli, ExitCodes) {
    const auto dir = scratch("exit");
    EXPECT_EQ(run_tool("simulate --replicas 0 --out " + dir.string()), cli::exit_config);
    EXPECT_EQ(run_tool("simulate --window 5 1 --out " + dir.string()), cli::exit_config);
    EXPECT_EQ(run_tool("analytic --query bogus --out " + dir.string()), cli::exit_config);
    EXPECT_EQ(run_tool("validate --suite nope --out " + dir.string()), cli::exit_config);
    EXPECT_EQ(run_tool("frobnicate"), cli::exit_config);
    EXPECT_EQ(run_tool("analytic --query selftest --out " + dir.string()), cli::exit_ok);
    const auto j = nlohmann::json::parse(slurp(dir / "analytic.json"));
    EXPECT_TRUE(j["pass"].get<bool>());
}

TEST(Cli, MarkovAndPalmOutputs) {
    const auto dir = scratch("outputs");
    const auto cfg = dir / "two.json";
    std::ofstream(cfg) << R"({"classes":[{"v":2,"lambda":0.5},{"v":1,"lambda":0.5}],"window":[0,100]})";
    ASSERT_EQ(run_tool("markov --config " + cfg.string() + " --steps 300 --out " + (dir / "m").string()), 0);
    const auto tm = nlohmann::json::parse(slurp(dir / "m" / "transition_matrix.json"));
    EXPECT_EQ(tm["types"].size(), 6u);
    EXPECT_EQ(tm["burn_in_steps"], 100);
    ASSERT_EQ(run_tool("palm --config " + cfg.string() + " --replicas 2 --out " + (dir / "p").string()), 0);
    EXPECT_TRUE(fs::exists(dir / "p" / "palm_report.json"));
    EXPECT_TRUE(fs::exists(dir / "p" / "hist_H.csv"));
    EXPECT_TRUE(fs::exists(dir / "p" / "hist_H_q2_p2_n1.csv"));
}

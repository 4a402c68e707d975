#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "handover/point_processes.hpp"
#include "handover/simulation.hpp"

namespace handover::cli {

constexpr const char* tool_version = "0.1.0";

enum ExitCode { exit_ok = 0, exit_config = 2, exit_runtime = 3, exit_validation = 4 };

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Keys: classes [{v, lambda}], window [t0, t1], epsilon, direction_law
// ("uniform" or {"kind": "fixed", "theta": x}), seed. Classes are sorted
// by decreasing speed and numbered from 1.
ScenarioConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ScenarioConfig& config);

struct Options {
    std::optional<std::string> config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::vector<double>> window;
    std::optional<double> epsilon;
    std::optional<double> lambda;  // single-class shortcut
    std::optional<double> v;
    std::size_t replicas = 4;
    std::size_t threads = 0;
    std::filesystem::path out = "out";
    std::string query = "frequency";
    std::size_t steps = 1000;
    std::size_t burn_in = 100;
    std::string suite = "full";
    std::vector<int> only;
};

// File config (if any), then flags on top. Validates the result.
ScenarioConfig resolve_config(const Options& opt);

struct EventRow {
    std::uint64_t replica = 0;
    HandoverEvent event;
};

void write_events_csv(const std::filesystem::path& path, const std::vector<ReplicaOutput>& reps);
std::vector<EventRow> read_events_csv(const std::filesystem::path& path);

// Bin edges, counts, density and an optional analytic pdf column.
void write_histogram(const std::filesystem::path& path, const std::vector<double>& samples,
                     std::size_t bins, const std::function<double(double)>& pdf = {});

std::string sha256_file(const std::filesystem::path& path);

struct RunManifest {
    std::string subcommand;
    ScenarioConfig config;
    std::size_t replicas = 0;
    std::vector<std::filesystem::path> outputs;
    double wall_clock = 0.0;
    std::size_t retries = 0;
    std::size_t overflows = 0;
    nlohmann::json extra = nlohmann::json::object();
};

// Writes manifest.json next to the outputs, with a content hash per file.
void write_manifest(const std::filesystem::path& out_dir, const RunManifest& manifest);

int cmd_simulate(const Options& opt);
int cmd_palm(const Options& opt);
int cmd_analytic(const Options& opt);
int cmd_markov(const Options& opt);
int cmd_validate(const Options& opt);

} // namespace handover::cli

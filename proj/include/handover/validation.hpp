#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace handover {

struct CriterionResult {
    int id = 0;
    std::string title;
    bool pass = false;
    std::vector<std::pair<std::string, double>> metrics;
    std::string note;
    double seconds = 0.0;
};

struct ValidationOptions {
    std::uint64_t seed = 1;
    std::size_t threads = 0;
    std::vector<int> only;  // empty runs every criterion
};

constexpr int criterion_count = 14;

// Runs the acceptance criteria in order. `on_result` is called as each
// one finishes.
std::vector<CriterionResult> run_validation(
    const ValidationOptions& options,
    const std::function<void(const CriterionResult&)>& on_result = {});

std::string format_result(const CriterionResult& r);

} // namespace handover

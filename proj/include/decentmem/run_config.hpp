#pragma once

#include "decentmem/sim.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace decentmem {

/// Simulation run configuration; validated on load with field-level
/// error messages. Schema documented in docs/config.md.
struct RunConfig {
    sim::WorkloadConfig workload;
    std::string judge_mode = "simulated"; // simulated | llm
    std::string out_dir = "out";

    static RunConfig from_json(const nlohmann::json& j);
    /// Reads a config file; a manifest file (top-level "config" object)
    /// is unwrapped so every run can be replayed from its manifest.
    static RunConfig load(const std::filesystem::path& path);
    nlohmann::json to_json() const;
};

struct TheoryReachConfig {
    std::size_t instances = 100;
    std::size_t max_states = 200;
    double alpha_max = 0.99;
    double tol = 1e-10;
};

struct TheoryRegretConfig {
    std::size_t horizon = 100'000;
    std::size_t seeds = 200;
    std::vector<double> fixed_alphas = {0.5};
    std::size_t window_lo = 1'000;
    std::size_t window_hi = 100'000;
    double log_fit_max_residual = 0.05;
    double tail_over_mid_max = 1.5;
    double ratio_max = 2.0;
    double online_vs_fixed_max = 0.05;
};

struct TheoryConfig {
    std::uint64_t seed = 7;
    std::string out_dir = "out";
    TheoryReachConfig reach;
    TheoryRegretConfig regret;

    static TheoryConfig from_json(const nlohmann::json& j);
    static TheoryConfig load(const std::filesystem::path& path);
    nlohmann::json to_json() const;
};

} // namespace decentmem

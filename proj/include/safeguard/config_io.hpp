#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "safeguard/bench.hpp"
#include "safeguard/sim.hpp"

namespace safeguard {

// Everything one benchmark run needs, cross-validated: the task, its robot
// registry entry, dynamics, safety index, filter, policy, and score sigmas.
struct RunBundle {
    TaskConfig task;
    std::string robot_key;
    const RobotModel* model = nullptr;
    DynamicsModel dyn;
    SafetyIndexSpec index;
    FilterParams filter;
    PolicyConfig policy;
    ScoreSigmas sigmas;
    double dt = 0.01;
    int max_steps = 200;
    std::vector<std::uint64_t> seeds;

    EpisodeSetup episode(std::uint64_t seed) const;
};

struct BundleOverrides {
    std::optional<std::string> task_file;  // load task from file instead of registry
    std::optional<std::string> algorithm;
    std::optional<double> param;
    std::optional<double> dt;
    std::optional<int> max_steps;
    std::optional<double> d_min_env, d_min_self;
    std::optional<int> episodes;
    std::optional<std::uint64_t> seed;
};

// Builds a validated bundle for a named benchmark task. Precedence:
// overrides > task file values > built-in defaults. The filter gain
// auto-fills from the tuned per-task table when not overridden.
RunBundle load_bundle(const std::string& task_name, const BundleOverrides& overrides);

// tuned gain per (task, algorithm)
double tuned_parameter(const std::string& task_name, Algorithm algo);

// canonical serialization of the bundle's effective configuration
std::string serialize_bundle(const RunBundle& bundle);

std::vector<std::string> task_names();

}  // namespace safeguard

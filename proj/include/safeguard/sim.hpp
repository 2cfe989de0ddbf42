#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "safeguard/dynamics.hpp"
#include "safeguard/env_task.hpp"
#include "safeguard/policy.hpp"
#include "safeguard/safe_control.hpp"
#include "safeguard/safety_index.hpp"

namespace safeguard {

struct StepRecord {
    int t = 0;
    Eigen::VectorXd x;
    Eigen::VectorXd u_ref, u_safe;
    double min_env_d = 0.0;
    std::optional<double> min_self_d;
    double phi_max = 0.0;
    std::optional<double> arm_goal_dist_left, arm_goal_dist_right;
    std::optional<double> base_goal_dist;
    SolveStatus filter_status = SolveStatus::Optimal;
    double loop_time = 0.0;    // seconds, wall clock (excluded from determinism)
    double filter_time = 0.0;  // seconds, wall clock
};

enum class Termination { GoalReached, MaxSteps, Collision, Error };

std::string termination_name(Termination t);

struct EpisodeLog {
    std::string task_name;
    Algorithm algorithm = Algorithm::Ssa;
    double param = 0.0;
    std::uint64_t seed = 0;
    double dt = 0.01;
    std::vector<StepRecord> records;
    Termination termination = Termination::MaxSteps;
    std::string error_message;
};

struct EpisodeSetup {
    TaskConfig task;
    const RobotModel* model = nullptr;
    DynamicsModel dyn;
    PolicyConfig policy;
    FilterParams filter;
    SafetyIndexSpec index;
    double dt = 0.01;
    std::uint64_t seed = 0;
};

// Runs one episode: FK/Jacobians -> pairwise distances -> constraint evals ->
// nominal control -> safety filter -> dynamics step -> obstacle/goal step.
// Terminates on interpenetration (Collision, the colliding step is the last
// record), a 10-step dwell inside the goal thresholds (GoalReached), or
// max_steps. Deterministic per (setup, seed) except wall-clock timing fields.
EpisodeLog run_episode(const EpisodeSetup& setup);

// goal thresholds: 0.02 m per hand, 0.05 m base, 10 consecutive steps
bool goal_reached(const std::vector<StepRecord>& records);

// Runs items concurrently on a bounded pool (SAFEGUARD_THREADS, default
// hardware concurrency); results are ordered by item index, never by
// completion order.
std::vector<EpisodeLog> run_batch(const std::vector<EpisodeSetup>& items, int threads = 0);

int default_thread_count();

// line-delimited trace (one record per line, docs/config_format.md)
void write_trace(const EpisodeLog& log, const std::string& path);

}  // namespace safeguard

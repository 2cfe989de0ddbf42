#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "safeguard/geometry.hpp"
#include "safeguard/kinematics.hpp"
#include "safeguard/rng.hpp"

namespace safeguard {

struct Workspace {
    Eigen::Vector3d lo, hi;
};

struct TaskConfig {
    std::string name;
    std::string robot_config;       // registry key
    int num_obstacles = 10;
    double obstacle_velocity = 0.0;  // per-step Brownian displacement scale (m)
    double arm_goal_velocity = 0.0;  // m per step
    double base_goal_velocity = 0.0; // m per step; NaN-free: unused for AG tasks
    bool has_base_goal = false;
    int max_steps = 200;
    Workspace workspace;
    double obstacle_radius_lo = 0.03, obstacle_radius_hi = 0.08;
    double obstacle_box_fraction = 0.0;  // fraction of obstacles emitted as boxes
};

enum class GoalMotion { Static, Circular, Brownian };

struct GoalSpec {
    std::optional<Eigen::Vector3d> left_arm, right_arm;
    std::optional<Eigen::Vector2d> base;
    GoalMotion motion = GoalMotion::Static;
    double circular_radius = 0.0, circular_rate = 0.0;  // rad per step
    double brownian_scale = 0.0;
    // anchors for circular motion
    std::optional<Eigen::Vector3d> left_anchor, right_anchor;
    std::optional<Eigen::Vector2d> base_anchor;
};

struct Environment {
    std::vector<Volume> obstacles;
    GoalSpec goals;
    std::uint64_t rng_seed = 0;
    int step_count = 0;
};

// Samples obstacles and reachable goals; rejection-samples until every
// robot-obstacle pair at the home pose clears d_min_env + 0.02 m (throws
// InfeasibleScenario after 1000 attempts per obstacle). Deterministic in
// (cfg, seed).
Environment generate_task(const TaskConfig& cfg, const RobotModel& model, std::uint64_t seed,
                          double d_min_env = 0.05);

// Brownian obstacle motion: displacement = obstacle_velocity * z with
// z ~ N(0, I3) clipped to ||z|| <= 3, reflected at the workspace bounds;
// linear_velocity is set to displacement / dt for the phi_dot obstacle terms.
Environment step_obstacles(const Environment& env, const TaskConfig& cfg, Rng& rng, double dt);

GoalSpec step_goals(const GoalSpec& goals, const TaskConfig& cfg, int t, Rng& rng);

// The eight bundled benchmark tasks (compiled in; identical files ship under
// models/tasks/).
const std::map<std::string, TaskConfig>& builtin_tasks();

TaskConfig load_task_from_text(const std::string& text, const std::string& path);
TaskConfig load_task_from_file(const std::string& path);

}  // namespace safeguard

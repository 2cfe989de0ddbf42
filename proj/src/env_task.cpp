#include "safeguard/env_task.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "safeguard/builtin_data.hpp"
#include "safeguard/dynamics.hpp"
#include "safeguard/errors.hpp"
#include "safeguard/textcfg.hpp"

namespace safeguard {

namespace {

constexpr double kStartClearance = 0.02;
constexpr int kMaxAttempts = 1000;

// goal shell around the shoulder frames (artifact default, see docs)
constexpr double kArmShellLo = 0.15;
constexpr double kArmShellHi = 0.45;
// base goal distance from the start pose
constexpr double kBaseGoalLo = 0.4;
constexpr double kBaseGoalHi = 1.0;

double min_clearance(const Volume& ob, const std::vector<TaggedVolume>& robot) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& rv : robot) {
        if (!rv.env_collision) continue;
        best = std::min(best, signed_distance(rv.volume, ob).d);
    }
    return best;
}

bool point_clear(const Eigen::Vector3d& p, double pad, const std::vector<Volume>& obstacles) {
    Volume probe = make_sphere("probe", p, std::max(pad, 1e-6));
    for (const auto& ob : obstacles)
        if (signed_distance(probe, ob).d < 0.0) return false;
    return true;
}

}  // namespace

Environment generate_task(const TaskConfig& cfg, const RobotModel& model, std::uint64_t seed,
                          double d_min_env) {
    Rng rng(seed);
    Environment env;
    env.rng_seed = seed;

    const Eigen::VectorXd theta0 = Eigen::VectorXd::Zero(model.dof_count());
    const FkResult fk = forward_kinematics(model, theta0);
    const std::vector<TaggedVolume> robot = posed_volumes(model, fk);

    for (int i = 0; i < cfg.num_obstacles; ++i) {
        bool placed = false;
        for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
            const Eigen::Vector3d c = rng.uniform_box(cfg.workspace.lo, cfg.workspace.hi);
            const double r = rng.uniform(cfg.obstacle_radius_lo, cfg.obstacle_radius_hi);
            const bool as_box = rng.uniform01() < cfg.obstacle_box_fraction;
            Volume ob = as_box ? make_box("obs" + std::to_string(i), c,
                                          Eigen::Vector3d::Constant(2.0 * r))
                               : make_sphere("obs" + std::to_string(i), c, r);
            if (min_clearance(ob, robot) > d_min_env + kStartClearance) {
                env.obstacles.push_back(std::move(ob));
                placed = true;
                break;
            }
        }
        if (!placed)
            throw InfeasibleScenario(cfg.name + ": could not place obstacle " +
                                     std::to_string(i));
    }

    // goals: arm goals in a reachability shell around the shoulders; for tasks
    // with a base goal the shell is evaluated at the base-goal pose so the
    // final configuration can satisfy both.
    GoalSpec goals;
    Eigen::Vector2d base_goal = Eigen::Vector2d::Zero();
    if (cfg.has_base_goal) {
        bool ok = false;
        for (int attempt = 0; attempt < kMaxAttempts && !ok; ++attempt) {
            const double ang = rng.uniform(0.0, 2.0 * M_PI);
            const double dist = rng.uniform(kBaseGoalLo, kBaseGoalHi);
            base_goal << dist * std::cos(ang), dist * std::sin(ang);
            const Eigen::Vector3d probe(base_goal.x(), base_goal.y(),
                                        0.5 * (cfg.workspace.lo.z() + cfg.workspace.hi.z()));
            ok = base_goal.x() > cfg.workspace.lo.x() + 0.3 &&
                 base_goal.x() < cfg.workspace.hi.x() - 0.3 &&
                 base_goal.y() > cfg.workspace.lo.y() + 0.3 &&
                 base_goal.y() < cfg.workspace.hi.y() - 0.3 &&
                 point_clear(probe, 0.25, env.obstacles);
        }
        if (!ok) throw InfeasibleScenario(cfg.name + ": could not place base goal");
        goals.base = base_goal;
        goals.base_anchor = base_goal;
    }

    auto sample_arm_goal = [&](int shoulder_frame,
                               int hand_frame) -> std::optional<Eigen::Vector3d> {
        if (hand_frame < 0) return std::nullopt;
        Eigen::Vector3d shoulder = fk.p.col(shoulder_frame);
        if (cfg.has_base_goal) shoulder.head<2>() += base_goal;  // shell at final base pose
        const double hand_r = 0.05;
        for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
            const Eigen::Vector3d g =
                shoulder + rng.uniform(kArmShellLo, kArmShellHi) * rng.unit_vector();
            if (g.z() < cfg.workspace.lo.z() || g.z() > cfg.workspace.hi.z()) continue;
            if (!point_clear(g, hand_r + d_min_env + 0.01, env.obstacles)) continue;
            // keep the target clear of the robot's own home volumes
            bool clear = true;
            for (const auto& rv : robot) {
                Eigen::Vector3d c = rv.volume.center;
                if (cfg.has_base_goal) c.head<2>() += base_goal;
                if ((g - c).norm() < rv.volume.radius + hand_r + 0.01) clear = false;
            }
            if (clear) return g;
        }
        throw InfeasibleScenario(cfg.name + ": could not place arm goal");
    };

    const int l_shoulder = model.frame_index("LeftShoulderPitch");
    const int r_shoulder = model.frame_index("RightShoulderPitch");
    if (model.left_hand_frame >= 0 && l_shoulder >= 0)
        goals.left_arm = sample_arm_goal(l_shoulder, model.left_hand_frame);
    if (model.right_hand_frame >= 0 && r_shoulder >= 0)
        goals.right_arm = sample_arm_goal(r_shoulder, model.right_hand_frame);

    goals.left_anchor = goals.left_arm;
    goals.right_anchor = goals.right_arm;
    goals.motion = GoalMotion::Static;
    env.goals = goals;
    return env;
}

Environment step_obstacles(const Environment& env, const TaskConfig& cfg, Rng& rng, double dt) {
    Environment out = env;
    out.step_count = env.step_count + 1;
    if (cfg.obstacle_velocity <= 0.0) {
        for (auto& ob : out.obstacles) ob.linear_velocity.setZero();
        return out;
    }
    for (auto& ob : out.obstacles) {
        Eigen::Vector3d z = rng.normal3();
        const double n = z.norm();
        if (n > 3.0) z *= 3.0 / n;
        Eigen::Vector3d disp = cfg.obstacle_velocity * z;
        Eigen::Vector3d c = ob.center + disp;
        for (int i = 0; i < 3; ++i) {  // reflect at workspace bounds
            if (c[i] < cfg.workspace.lo[i]) c[i] = 2.0 * cfg.workspace.lo[i] - c[i];
            if (c[i] > cfg.workspace.hi[i]) c[i] = 2.0 * cfg.workspace.hi[i] - c[i];
        }
        ob.linear_velocity = (c - ob.center) / dt;
        ob.center = c;
    }
    return out;
}

GoalSpec step_goals(const GoalSpec& goals, const TaskConfig& cfg, int t, Rng& rng) {
    GoalSpec out = goals;
    switch (goals.motion) {
        case GoalMotion::Static:
            break;
        case GoalMotion::Circular: {
            const double a = goals.circular_rate * static_cast<double>(t);
            const Eigen::Vector3d off(goals.circular_radius * (std::cos(a) - 1.0),
                                      goals.circular_radius * std::sin(a), 0.0);
            if (out.left_anchor) out.left_arm = *out.left_anchor + off;
            if (out.right_anchor) out.right_arm = *out.right_anchor + off;
            if (out.base_anchor) out.base = *out.base_anchor + off.head<2>();
            break;
        }
        case GoalMotion::Brownian: {
            auto walk3 = [&](std::optional<Eigen::Vector3d>& g) {
                if (g) *g += goals.brownian_scale * rng.normal3();
            };
            walk3(out.left_arm);
            walk3(out.right_arm);
            if (out.base) {
                Eigen::Vector2d step;
                step << rng.normal(), rng.normal();
                *out.base += goals.brownian_scale * step;
            }
            break;
        }
    }
    (void)cfg;
    return out;
}

TaskConfig load_task_from_text(const std::string& text, const std::string& path) {
    const CfgDoc doc = parse_cfg_text(text, path);
    if (cfg_int(doc, doc.require("schema_version"), 0) != 1)
        throw ValidationError("schema_version", "expected 1 in " + doc.path);
    if (cfg_str(doc, doc.require("type"), 0) != "task_config")
        throw ValidationError("type", "expected task_config in " + doc.path);

    TaskConfig t;
    t.name = cfg_str(doc, doc.require("name"), 0);
    t.robot_config = cfg_str(doc, doc.require("robot_config"), 0);
    t.num_obstacles = cfg_int(doc, doc.require("num_obstacles"), 0);
    t.obstacle_velocity = cfg_double(doc, doc.require("obstacle_velocity"), 0);
    t.arm_goal_velocity = cfg_double(doc, doc.require("arm_goal_velocity"), 0);
    const auto& bg = doc.require("base_goal_velocity");
    if (cfg_str(doc, bg, 0) == "N/A") {
        t.has_base_goal = false;
        t.base_goal_velocity = 0.0;
    } else {
        t.has_base_goal = true;
        t.base_goal_velocity = cfg_double(doc, bg, 0);
    }
    t.max_steps = cfg_int(doc, doc.require("max_steps"), 0);
    const auto& ws = doc.require("workspace");
    for (int i = 0; i < 3; ++i) t.workspace.lo[i] = cfg_double(doc, ws, i);
    for (int i = 0; i < 3; ++i) t.workspace.hi[i] = cfg_double(doc, ws, i + 3);
    const auto& rr = doc.require("obstacle_radius_range");
    t.obstacle_radius_lo = cfg_double(doc, rr, 0);
    t.obstacle_radius_hi = cfg_double(doc, rr, 1);
    if (doc.has("obstacle_box_fraction"))
        t.obstacle_box_fraction = cfg_double(doc, doc.require("obstacle_box_fraction"), 0);

    if (t.num_obstacles < 0) throw ValidationError("num_obstacles", "must be >= 0");
    if (t.obstacle_velocity < 0) throw ValidationError("obstacle_velocity", "must be >= 0");
    if ((t.workspace.hi - t.workspace.lo).minCoeff() <= 0)
        throw ValidationError("workspace", "must have positive extent");
    if (!(t.obstacle_radius_lo > 0 && t.obstacle_radius_hi >= t.obstacle_radius_lo))
        throw ValidationError("obstacle_radius_range", "need 0 < lo <= hi");
    return t;
}

TaskConfig load_task_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path, 0, "cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_task_from_text(buf.str(), path);
}

const std::map<std::string, TaskConfig>& builtin_tasks() {
    static const std::map<std::string, TaskConfig> tasks = [] {
        std::map<std::string, TaskConfig> m;
        for (const auto& [path, content] : builtin_data()) {
            if (path.rfind("tasks/", 0) != 0) continue;
            TaskConfig t = load_task_from_text(content, path);
            m.emplace(t.name, std::move(t));
        }
        return m;
    }();
    return tasks;
}

}  // namespace safeguard

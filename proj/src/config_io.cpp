#include "safeguard/config_io.hpp"

#include <iomanip>
#include <sstream>

#include "safeguard/errors.hpp"

namespace safeguard {

namespace {

struct TunedRow {
    const char* task;
    double ssa, sss, cbf, pfm, sma;
};

// tuned per-task filter gains used by the benchmark runs
constexpr TunedRow kTunedParams[] = {
    {"G1FixedBase_D1_AG_SO_v0", 0.2, 10.0, 20.0, 0.1, 40.0},
    {"G1FixedBase_D1_AG_SO_v1", 0.01, 0.4, 6.0, 1.0, 7.0},
    {"G1FixedBase_D1_AG_DO_v0", 0.01, 0.7, 0.5, 0.4, 6.0},
    {"G1FixedBase_D1_AG_DO_v1", 0.01, 0.01, 1.0, 0.01, 6.0},
    {"G1MobileBase_D1_WG_SO_v0", 0.8, 60.0, 80.0, 0.9, 6.0},
    {"G1MobileBase_D1_WG_SO_v1", 0.2, 60.0, 100.0, 0.8, 9.0},
    {"G1MobileBase_D1_WG_DO_v0", 0.9, 200.0, 3.0, 2.0, 7.0},
    {"G1MobileBase_D1_WG_DO_v1", 0.4, 100.0, 100.0, 0.7, 0.1},
};

}  // namespace

double tuned_parameter(const std::string& task_name, Algorithm algo) {
    for (const auto& row : kTunedParams) {
        if (task_name != row.task) continue;
        switch (algo) {
            case Algorithm::Ssa: return row.ssa;
            case Algorithm::Sss: return row.sss;
            case Algorithm::Cbf: return row.cbf;
            case Algorithm::Pfm: return row.pfm;
            case Algorithm::Sma: return row.sma;
        }
    }
    throw ValidationError("task", "no tuned parameters for task '" + task_name + "'");
}

std::vector<std::string> task_names() {
    std::vector<std::string> names;
    for (const auto& [name, cfg] : builtin_tasks()) names.push_back(name);
    return names;
}

EpisodeSetup RunBundle::episode(std::uint64_t seed) const {
    EpisodeSetup s;
    s.task = task;
    s.model = model;
    s.dyn = dyn;
    s.policy = policy;
    s.filter = filter;
    s.index = index;
    s.dt = dt;
    s.seed = seed;
    return s;
}

RunBundle load_bundle(const std::string& task_name, const BundleOverrides& ov) {
    RunBundle b;
    if (ov.task_file) {
        b.task = load_task_from_file(*ov.task_file);
    } else {
        const auto& tasks = builtin_tasks();
        const auto it = tasks.find(task_name);
        if (it == tasks.end()) {
            std::string valid;
            for (const auto& n : task_names()) valid += n + " ";
            throw ValidationError("task", "unknown task '" + task_name +
                                              "'; valid names: " + valid);
        }
        b.task = it->second;
    }

    const auto& registry = robot_registry();
    const auto rit = registry.find(b.task.robot_config);
    if (rit == registry.end())
        throw ValidationError("robot_config",
                              "unknown robot config '" + b.task.robot_config + "'");
    const RobotConfigEntry& entry = rit->second;
    b.robot_key = entry.name;
    b.model = entry.model;
    b.dyn = make_dynamics(*entry.model, entry.dynamics_order);

    // safety index order follows the dynamics order
    b.index.order = entry.dynamics_order == 2 ? IndexOrder::Order2 : IndexOrder::Order1;
    if (ov.d_min_env) b.index.d_min_env = *ov.d_min_env;
    if (ov.d_min_self) b.index.d_min_self = *ov.d_min_self;
    b.index.validate();

    b.filter.algorithm =
        ov.algorithm ? algorithm_from_string(*ov.algorithm) : Algorithm::Ssa;
    if (ov.param) {
        b.filter.gain = *ov.param;
    } else {
        b.filter.gain = tuned_parameter(b.task.name, b.filter.algorithm);
    }
    if (b.filter.gain < 0.0) throw ValidationError("param", "must be >= 0");

    if (ov.dt) b.dt = *ov.dt;
    if (!(b.dt > 0.0)) throw ValidationError("dt", "must be > 0");
    if (ov.max_steps) b.task.max_steps = *ov.max_steps;
    if (b.task.max_steps <= 0) throw ValidationError("max_steps", "must be > 0");
    b.max_steps = b.task.max_steps;

    const int episodes = ov.episodes.value_or(10);
    if (episodes <= 0) throw ValidationError("episodes", "must be > 0");
    const std::uint64_t seed0 = ov.seed.value_or(1);
    for (int i = 0; i < episodes; ++i) b.seeds.push_back(seed0 + static_cast<std::uint64_t>(i));
    return b;
}

std::string serialize_bundle(const RunBundle& b) {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "schema_version 1\n";
    os << "type run_bundle\n";
    os << "task " << b.task.name << "\n";
    os << "robot_config " << b.robot_key << "\n";
    os << "dynamics_order " << b.dyn.order << "\n";
    os << "algorithm " << algorithm_name(b.filter.algorithm) << "\n";
    os << "param " << b.filter.gain << "\n";
    os << "activation_tolerance " << b.filter.activation_tolerance << "\n";
    os << "slack_penalty " << b.filter.slack_penalty << "\n";
    os << "d_min_env " << b.index.d_min_env << "\n";
    os << "d_min_self " << b.index.d_min_self << "\n";
    os << "index_exponent " << b.index.exponent << "\n";
    os << "index_gain " << b.index.gain << "\n";
    os << "dt " << b.dt << "\n";
    os << "max_steps " << b.max_steps << "\n";
    os << "kp_arm " << b.policy.kp_arm << "\n";
    os << "kp_base_lin " << b.policy.kp_base_lin << "\n";
    os << "kp_base_yaw " << b.policy.kp_base_yaw << "\n";
    os << "kd " << b.policy.kd << "\n";
    os << "ik_damping " << b.policy.ik_damping << "\n";
    os << "sigma_arm " << b.sigmas.arm << "\n";
    os << "sigma_base " << b.sigmas.base << "\n";
    os << "sigma_env " << b.sigmas.env << "\n";
    os << "sigma_self " << b.sigmas.self << "\n";
    os << "num_obstacles " << b.task.num_obstacles << "\n";
    os << "obstacle_velocity " << b.task.obstacle_velocity << "\n";
    os << "seeds";
    for (const auto s : b.seeds) os << ' ' << s;
    os << "\n";
    return os.str();
}

}  // namespace safeguard

#include "safeguard/sim.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <thread>

#include "safeguard/errors.hpp"

namespace safeguard {

std::string termination_name(Termination t) {
    switch (t) {
        case Termination::GoalReached: return "goal_reached";
        case Termination::MaxSteps: return "max_steps";
        case Termination::Collision: return "collision";
        case Termination::Error: return "error";
    }
    return "?";
}

namespace {

constexpr double kArmGoalTol = 0.02;
constexpr double kBaseGoalTol = 0.05;
constexpr int kDwellSteps = 10;

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

bool goal_reached(const std::vector<StepRecord>& records) {
    if (records.size() < kDwellSteps) return false;
    for (size_t k = records.size() - kDwellSteps; k < records.size(); ++k) {
        const auto& r = records[k];
        if (!r.arm_goal_dist_left && !r.arm_goal_dist_right && !r.base_goal_dist) return false;
        if (r.arm_goal_dist_left && *r.arm_goal_dist_left >= kArmGoalTol) return false;
        if (r.arm_goal_dist_right && *r.arm_goal_dist_right >= kArmGoalTol) return false;
        if (r.base_goal_dist && *r.base_goal_dist >= kBaseGoalTol) return false;
    }
    return true;
}

EpisodeLog run_episode(const EpisodeSetup& setup) {
    EpisodeLog log;
    log.task_name = setup.task.name;
    log.algorithm = setup.filter.algorithm;
    log.param = setup.filter.gain;
    log.seed = setup.seed;
    log.dt = setup.dt;

    const RobotModel& model = *setup.model;
    const DynamicsModel& dyn = setup.dyn;

    try {
        Environment env = generate_task(setup.task, model, setup.seed, setup.index.d_min_env);
        Rng motion_rng(setup.seed ^ 0x9e3779b97f4a7c15ULL);
        State x = make_home_state(dyn);

        FilterContext ctx;
        ctx.dyn = &dyn;

        for (int t = 0; t < setup.task.max_steps; ++t) {
            const auto t_loop = std::chrono::steady_clock::now();

            const Eigen::VectorXd theta = x.theta(dyn);
            const Eigen::VectorXd theta_dot = x.theta_dot(dyn);
            const FkResult fk = forward_kinematics(model, theta);
            const Eigen::MatrixXd J = jacobian(model, theta);
            Eigen::VectorXd jd_qd = Eigen::VectorXd::Zero(3 * model.frame_count());
            Eigen::VectorXd frame_vel = Eigen::VectorXd::Zero(3 * model.frame_count());
            if (dyn.order == 2) {
                jd_qd = jacobian_dot_qdot(model, theta, theta_dot);
                frame_vel = J * theta_dot;
            }

            const std::vector<TaggedVolume> robot_vols = posed_volumes(model, fk, frame_vel);
            const std::vector<PairDistance> pairs =
                all_pairs(robot_vols, env.obstacles, model.self_pairs);
            const std::vector<ConstraintEval> evals =
                evaluate_constraints(model, dyn, setup.index, x, pairs, J, jd_qd);

            const Eigen::VectorXd u_ref =
                nominal_control(model, dyn, x, env.goals, setup.policy);

            ctx.x = &x;
            ctx.J = &J;
            const auto t_filter = std::chrono::steady_clock::now();
            const SafeControlResult res = apply_filter(u_ref, evals, setup.filter, ctx);
            const double filter_time = seconds_since(t_filter);

            StepRecord rec;
            rec.t = t;
            rec.x = x.x;
            rec.u_ref = u_ref;
            rec.u_safe = res.u_safe;
            rec.filter_status = res.status;
            rec.filter_time = filter_time;

            double min_env = std::numeric_limits<double>::infinity();
            std::optional<double> min_self;
            for (const auto& p : pairs) {
                if (p.category == PairCategory::Env)
                    min_env = std::min(min_env, p.d);
                else
                    min_self = min_self ? std::min(*min_self, p.d) : p.d;
            }
            rec.min_env_d = min_env;
            rec.min_self_d = min_self;
            rec.phi_max = -std::numeric_limits<double>::infinity();
            for (const auto& e : evals) rec.phi_max = std::max(rec.phi_max, e.phi);
            if (evals.empty()) rec.phi_max = 0.0;

            if (env.goals.left_arm && model.left_hand_frame >= 0)
                rec.arm_goal_dist_left =
                    (*env.goals.left_arm - Eigen::Vector3d(fk.p.col(model.left_hand_frame)))
                        .norm();
            if (env.goals.right_arm && model.right_hand_frame >= 0)
                rec.arm_goal_dist_right =
                    (*env.goals.right_arm - Eigen::Vector3d(fk.p.col(model.right_hand_frame)))
                        .norm();
            if (env.goals.base && dyn.mobile())
                rec.base_goal_dist = (*env.goals.base - Eigen::Vector2d(theta.head<2>())).norm();

            x = step(dyn, x, res.u_safe, setup.dt).x;
            env = step_obstacles(env, setup.task, motion_rng, setup.dt);
            env.goals = step_goals(env.goals, setup.task, t + 1, motion_rng);

            rec.loop_time = seconds_since(t_loop);
            log.records.push_back(std::move(rec));

            const double min_any =
                std::min(log.records.back().min_env_d,
                         log.records.back().min_self_d.value_or(1e9));
            if (min_any < 0.0) {
                log.termination = Termination::Collision;
                return log;
            }
            if (goal_reached(log.records)) {
                log.termination = Termination::GoalReached;
                return log;
            }
        }
        log.termination = Termination::MaxSteps;
    } catch (const Error& e) {
        log.termination = Termination::Error;
        log.error_message = e.what();
    }
    return log;
}

int default_thread_count() {
    if (const char* env = std::getenv("SAFEGUARD_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 4;
}

std::vector<EpisodeLog> run_batch(const std::vector<EpisodeSetup>& items, int threads) {
    if (threads <= 0) threads = default_thread_count();
    threads = std::min(threads, static_cast<int>(std::max<size_t>(items.size(), 1)));
    std::vector<EpisodeLog> out(items.size());
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (size_t i = next.fetch_add(1); i < items.size(); i = next.fetch_add(1))
            out[i] = run_episode(items[i]);  // merged by index, not completion order
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    return out;
}

void write_trace(const EpisodeLog& log, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open trace file " + path);
    out.precision(17);
    out << "# trace_schema 1 task " << log.task_name << " algo "
        << algorithm_name(log.algorithm) << " param " << log.param << " seed " << log.seed
        << " dt " << log.dt << " termination " << termination_name(log.termination) << "\n";
    for (const auto& r : log.records) {
        out << "t " << r.t;
        out << " x";
        for (int i = 0; i < r.x.size(); ++i) out << ' ' << r.x[i];
        out << " u_ref";
        for (int i = 0; i < r.u_ref.size(); ++i) out << ' ' << r.u_ref[i];
        out << " u_safe";
        for (int i = 0; i < r.u_safe.size(); ++i) out << ' ' << r.u_safe[i];
        out << " min_env_d " << r.min_env_d;
        out << " min_self_d " << (r.min_self_d ? std::to_string(*r.min_self_d) : "NA");
        out << " phi_max " << r.phi_max;
        if (r.arm_goal_dist_left) out << " arm_l " << *r.arm_goal_dist_left;
        if (r.arm_goal_dist_right) out << " arm_r " << *r.arm_goal_dist_right;
        if (r.base_goal_dist) out << " base " << *r.base_goal_dist;
        out << " loop_time " << r.loop_time << " filter_time " << r.filter_time << "\n";
    }
}

}  // namespace safeguard

#pragma once

#include <Eigen/Core>

#include "safeguard/dynamics.hpp"
#include "safeguard/env_task.hpp"
#include "safeguard/kinematics.hpp"

namespace safeguard {

// Safety-unaware reference controller: proportional base tracking plus
// damped-least-squares differential IK for the arms (PD wrapper for
// second-order models). Gains are artifact defaults chosen so the
// unobstructed system settles within the 200-step episode budget at
// dt = 0.01 s.
struct PolicyConfig {
    double kp_arm = 2.0;
    double kp_base_lin = 2.0;
    double kp_base_yaw = 2.0;
    double kd = 5.0;
    double ik_damping = 0.05;
    double output_clamp = 0.0;  // per-channel clamp on theta_dot_des; 0 = off
};

Eigen::VectorXd nominal_control(const RobotModel& model, const DynamicsModel& dyn,
                                const State& x, const GoalSpec& goals,
                                const PolicyConfig& cfg);

}  // namespace safeguard

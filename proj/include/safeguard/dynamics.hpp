#pragma once

#include <Eigen/Core>

#include "safeguard/kinematics.hpp"

namespace safeguard {

// Control-affine state-space model xdot = f(x) + g(x) u.
//
// First order: x = theta, u = theta_dot (base channels commanded in the body
// frame for mobile models). Second order: x = (theta, theta_dot) stacked with
// theta_dot in the world frame; u is acceleration (body frame for the base).
struct DynamicsModel {
    int order = 1;
    BaseKind base_kind = BaseKind::Fixed;
    int n = 0;
    int state_dim = 0;
    int control_dim = 0;
    Eigen::VectorXd control_lo, control_hi;
    Eigen::VectorXd position_lo, position_hi;

    bool mobile() const { return base_kind == BaseKind::Mobile; }
};

// Default control limits: joints +-3 rad/s (first order) / +-20 rad/s^2
// (second order); base +-1 m/s, +-1 rad/s / +-3 m/s^2, +-3 rad/s^2. The
// benchmark's source gives no numeric limits; these are declared artifact
// defaults and can be overridden through the run bundle.
DynamicsModel make_dynamics(const RobotModel& model, int order);

struct State {
    Eigen::VectorXd x;

    Eigen::VectorXd theta(const DynamicsModel& m) const { return x.head(m.n); }
    Eigen::VectorXd theta_dot(const DynamicsModel& m) const {
        return m.order == 2 ? Eigen::VectorXd(x.tail(m.n)) : Eigen::VectorXd::Zero(m.n);
    }
};

State make_home_state(const DynamicsModel& m);

struct FgPair {
    Eigen::VectorXd f;
    Eigen::MatrixXd g;
};

FgPair eval_fg(const DynamicsModel& model, const State& x);

// Velocity-level control map: the matrix taking u to theta_dot (first order)
// or theta_ddot (second order). Identity except for the body-to-world yaw
// rotation on mobile base channels.
Eigen::MatrixXd control_map(const DynamicsModel& model, const State& x);

// Acceleration-row drift for second-order models (zero vector for first
// order): the centripetal terms a body-frame-constant velocity induces on the
// mobile base, zero elsewhere.
Eigen::VectorXd accel_drift(const DynamicsModel& model, const State& x);

struct StepResult {
    State x;
    bool control_clamped = false;
};

// Explicit Euler step with control clamped to limits and joint positions
// clamped to position limits (clamped channels get zeroed velocities in
// second-order models). Throws NonFiniteState if the result is non-finite.
StepResult step(const DynamicsModel& model, const State& x, const Eigen::VectorXd& u, double dt);

Eigen::VectorXd clamp_control(const DynamicsModel& model, const Eigen::VectorXd& u);

}  // namespace safeguard

#include "safeguard/dynamics.hpp"

#include <cmath>

#include "safeguard/errors.hpp"

namespace safeguard {

DynamicsModel make_dynamics(const RobotModel& model, int order) {
    if (order != 1 && order != 2) throw ValidationError("order", "must be 1 or 2");
    DynamicsModel d;
    d.order = order;
    d.base_kind = model.base_kind;
    d.n = model.dof_count();
    d.state_dim = order == 2 ? 2 * d.n : d.n;
    d.control_dim = d.n;
    d.position_lo = model.limits_lo();
    d.position_hi = model.limits_hi();

    const double joint_lim = order == 1 ? 3.0 : 20.0;
    const double base_lim = order == 1 ? 1.0 : 3.0;
    d.control_lo = Eigen::VectorXd::Constant(d.n, -joint_lim);
    d.control_hi = Eigen::VectorXd::Constant(d.n, joint_lim);
    if (d.mobile()) {
        d.control_lo.head<3>().setConstant(-base_lim);
        d.control_hi.head<3>().setConstant(base_lim);
    }
    return d;
}

State make_home_state(const DynamicsModel& m) {
    State s;
    s.x = Eigen::VectorXd::Zero(m.state_dim);
    return s;
}

namespace {

Eigen::Matrix3d yaw_rotation(double psi) {
    Eigen::Matrix3d r;
    r << std::cos(psi), -std::sin(psi), 0, std::sin(psi), std::cos(psi), 0, 0, 0, 1;
    return r;
}

void check_state(const DynamicsModel& m, const State& x) {
    if (x.x.size() != m.state_dim)
        throw DimensionMismatch("state has " + std::to_string(x.x.size()) +
                                " entries, expected " + std::to_string(m.state_dim));
}

}  // namespace

Eigen::MatrixXd control_map(const DynamicsModel& model, const State& x) {
    check_state(model, x);
    Eigen::MatrixXd g = Eigen::MatrixXd::Identity(model.n, model.n);
    if (model.mobile()) g.topLeftCorner<3, 3>() = yaw_rotation(x.x[2]);
    return g;
}

Eigen::VectorXd accel_drift(const DynamicsModel& model, const State& x) {
    check_state(model, x);
    Eigen::VectorXd h = Eigen::VectorXd::Zero(model.n);
    if (model.order == 2 && model.mobile()) {
        const double psi = x.x[2];
        const double pxd = x.x[model.n + 0];
        const double pyd = x.x[model.n + 1];
        const double psid = x.x[model.n + 2];
        // body-frame velocity components of the current world-frame velocity
        const double vx = pxd * std::cos(psi) + pyd * std::sin(psi);
        const double vy = -pxd * std::sin(psi) + pyd * std::cos(psi);
        h[0] = -vx * psid * std::sin(psi) - vy * psid * std::cos(psi);
        h[1] = vx * psid * std::cos(psi) - vy * psid * std::sin(psi);
    }
    return h;
}

FgPair eval_fg(const DynamicsModel& model, const State& x) {
    check_state(model, x);
    FgPair out;
    if (model.order == 1) {
        out.f = Eigen::VectorXd::Zero(model.n);
        out.g = control_map(model, x);
    } else {
        out.f = Eigen::VectorXd::Zero(2 * model.n);
        out.f.head(model.n) = x.x.tail(model.n);
        out.f.tail(model.n) = accel_drift(model, x);
        out.g = Eigen::MatrixXd::Zero(2 * model.n, model.n);
        out.g.bottomRows(model.n) = control_map(model, x);
    }
    return out;
}

Eigen::VectorXd clamp_control(const DynamicsModel& model, const Eigen::VectorXd& u) {
    return u.cwiseMax(model.control_lo).cwiseMin(model.control_hi);
}

StepResult step(const DynamicsModel& model, const State& x, const Eigen::VectorXd& u, double dt) {
    check_state(model, x);
    if (u.size() != model.control_dim) throw DimensionMismatch("control size mismatch");
    if (!(dt > 0.0)) throw ValidationError("dt", "must be > 0");

    const Eigen::VectorXd uc = clamp_control(model, u);
    const bool clamped = (uc - u).cwiseAbs().maxCoeff() > 0.0;

    const FgPair fg = eval_fg(model, x);
    StepResult out;
    out.control_clamped = clamped;
    out.x.x = x.x + (fg.f + fg.g * uc) * dt;

    for (int j = 0; j < model.n; ++j) {
        if (out.x.x[j] < model.position_lo[j]) {
            out.x.x[j] = model.position_lo[j];
            if (model.order == 2) out.x.x[model.n + j] = 0.0;
        } else if (out.x.x[j] > model.position_hi[j]) {
            out.x.x[j] = model.position_hi[j];
            if (model.order == 2) out.x.x[model.n + j] = 0.0;
        }
    }
    if (!out.x.x.allFinite()) throw NonFiniteState("non-finite state after step");
    return out;
}

}  // namespace safeguard

#include "safeguard/policy.hpp"

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "safeguard/errors.hpp"

namespace safeguard {

namespace {

double wrap_angle(double a) {
    while (a > M_PI) a -= 2.0 * M_PI;
    while (a < -M_PI) a += 2.0 * M_PI;
    return a;
}

}  // namespace

Eigen::VectorXd nominal_control(const RobotModel& model, const DynamicsModel& dyn,
                                const State& x, const GoalSpec& goals,
                                const PolicyConfig& cfg) {
    const int n = dyn.n;
    if (x.x.size() != dyn.state_dim) throw DimensionMismatch("nominal_control: state size");
    const Eigen::VectorXd theta = x.theta(dyn);
    const FkResult fk = forward_kinematics(model, theta);
    const Eigen::MatrixXd J = jacobian(model, theta);

    // stack hand-position rows for hands with goals
    std::vector<std::pair<int, Eigen::Vector3d>> targets;
    if (goals.left_arm && model.left_hand_frame >= 0)
        targets.push_back({model.left_hand_frame, *goals.left_arm});
    if (goals.right_arm && model.right_hand_frame >= 0)
        targets.push_back({model.right_hand_frame, *goals.right_arm});

    Eigen::VectorXd theta_dot_des = Eigen::VectorXd::Zero(n);
    if (!targets.empty()) {
        const int rows = 3 * static_cast<int>(targets.size());
        Eigen::MatrixXd Jh(rows, n);
        Eigen::VectorXd v_des(rows);
        for (size_t k = 0; k < targets.size(); ++k) {
            Jh.middleRows(3 * static_cast<int>(k), 3) = J.middleRows(3 * targets[k].first, 3);
            v_des.segment(3 * static_cast<int>(k), 3) =
                cfg.kp_arm * (targets[k].second - Eigen::Vector3d(fk.p.col(targets[k].first)));
        }
        if (dyn.mobile()) Jh.leftCols<3>().setZero();  // base channels come from base PID
        Eigen::MatrixXd JJt = Jh * Jh.transpose();
        JJt.diagonal().array() += cfg.ik_damping * cfg.ik_damping;
        theta_dot_des = Jh.transpose() * JJt.ldlt().solve(v_des);
    }

    if (dyn.mobile() && goals.base) {
        const double psi = theta[2];
        const Eigen::Vector2d e = *goals.base - theta.head<2>();
        Eigen::Matrix2d rt;  // world -> body
        rt << std::cos(psi), std::sin(psi), -std::sin(psi), std::cos(psi);
        const Eigen::Vector2d v_body = cfg.kp_base_lin * (rt * e);
        theta_dot_des[0] = v_body.x();
        theta_dot_des[1] = v_body.y();
        theta_dot_des[2] = e.norm() > 0.05
                               ? cfg.kp_base_yaw * wrap_angle(std::atan2(e.y(), e.x()) - psi)
                               : 0.0;
    }

    if (cfg.output_clamp > 0.0)
        theta_dot_des = theta_dot_des.cwiseMax(-cfg.output_clamp).cwiseMin(cfg.output_clamp);

    Eigen::VectorXd u_ref;
    if (dyn.order == 1) {
        u_ref = theta_dot_des;
    } else {
        Eigen::VectorXd vel = x.x.tail(n);
        if (dyn.mobile()) {  // current base velocity world -> body for the PD error
            const double psi = theta[2];
            Eigen::Matrix2d rt;
            rt << std::cos(psi), std::sin(psi), -std::sin(psi), std::cos(psi);
            vel.head<2>() = rt * Eigen::Vector2d(vel.head<2>());
        }
        u_ref = cfg.kd * (theta_dot_des - vel);
    }
    return clamp_control(dyn, u_ref);
}

}  // namespace safeguard

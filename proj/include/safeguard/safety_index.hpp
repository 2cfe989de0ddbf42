#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "safeguard/dynamics.hpp"
#include "safeguard/geometry.hpp"
#include "safeguard/kinematics.hpp"

namespace safeguard {

enum class IndexOrder { Order1, Order2 };

// Safety index family. Sign convention: phi > 0 means the margin is violated
// (the state is unsafe), phi <= 0 is safe.
//
//   Order1:  phi = d_min - d
//   Order2:  phi = d_min^n - d^n - k * d_dot
//
// where the d^n term uses sign(d)*|d|^n so phi stays monotone through
// penetration, and d_min is d_min_env or d_min_self per pair category.
struct SafetyIndexSpec {
    IndexOrder order = IndexOrder::Order1;
    double d_min_env = 0.05;
    double d_min_self = 0.03;
    double exponent = 2.0;  // n > 0 (Order2)
    double gain = 1.0;      // k > 0 (Order2)

    double d_min(PairCategory cat) const {
        return cat == PairCategory::Env ? d_min_env : d_min_self;
    }
    void validate() const;
};

double phi(const SafetyIndexSpec& spec, const PairDistance& pair);

// One safety constraint linearized in the control: phi_dot = Lf + Lg * u.
struct ConstraintEval {
    std::string id_a, id_b;
    PairCategory category = PairCategory::Env;
    double phi = 0.0;
    double Lf = 0.0;
    Eigen::RowVectorXd Lg;
    // Cartesian gradient of phi at the two volume centers. For Order2 the
    // position part carries only the distance term (the velocity-curvature
    // contribution enters Lf numerically); grad_v_* is d(phi)/d(velocity).
    Eigen::Vector3d grad_p_a = Eigen::Vector3d::Zero();
    Eigen::Vector3d grad_p_b = Eigen::Vector3d::Zero();
    Eigen::Vector3d grad_v_a = Eigen::Vector3d::Zero();
    Eigen::Vector3d grad_v_b = Eigen::Vector3d::Zero();
    int frame_a = -1, frame_b = -1;  // -1 = world-attached (obstacle)
};

// Evaluates phi and its Lie derivatives for one pair. J is the 3m x n stacked
// positional Jacobian at the current configuration and jdot_qdot the 3m
// vector of dJ/dt * theta_dot (ignored for first-order models).
ConstraintEval lie_derivatives(const RobotModel& model, const DynamicsModel& dyn,
                               const SafetyIndexSpec& spec, const State& x,
                               const PairDistance& pair, const Eigen::MatrixXd& J,
                               const Eigen::VectorXd& jdot_qdot);

std::vector<ConstraintEval> evaluate_constraints(const RobotModel& model,
                                                 const DynamicsModel& dyn,
                                                 const SafetyIndexSpec& spec, const State& x,
                                                 const std::vector<PairDistance>& pairs,
                                                 const Eigen::MatrixXd& J,
                                                 const Eigen::VectorXd& jdot_qdot);

}  // namespace safeguard

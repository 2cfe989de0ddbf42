#include "safeguard/safety_index.hpp"

#include <cmath>

#include "safeguard/errors.hpp"

namespace safeguard {

void SafetyIndexSpec::validate() const {
    if (!(d_min_env > 0.0)) throw ValidationError("d_min_env", "must be > 0");
    if (!(d_min_self > 0.0)) throw ValidationError("d_min_self", "must be > 0");
    if (order == IndexOrder::Order2) {
        if (!(exponent > 0.0)) throw ValidationError("exponent", "must be > 0");
        if (!(gain > 0.0)) throw ValidationError("gain", "must be > 0");
    }
}

namespace {

double sign_pow(double v, double n) {
    return v >= 0.0 ? std::pow(v, n) : -std::pow(-v, n);
}

}  // namespace

double phi(const SafetyIndexSpec& spec, const PairDistance& pair) {
    const double dm = spec.d_min(pair.category);
    if (spec.order == IndexOrder::Order1) return dm - pair.d;
    return sign_pow(dm, spec.exponent) - sign_pow(pair.d, spec.exponent) -
           spec.gain * pair.d_dot;
}

namespace {

// d(sign(d)|d|^n)/dd = n |d|^(n-1), valid on both sides of zero
double sign_pow_deriv(double d, double n) {
    return n * std::pow(std::abs(d), n - 1.0);
}

}  // namespace

ConstraintEval lie_derivatives(const RobotModel& model, const DynamicsModel& dyn,
                               const SafetyIndexSpec& spec, const State& x,
                               const PairDistance& pair, const Eigen::MatrixXd& J,
                               const Eigen::VectorXd& jdot_qdot) {
    if (J.rows() != 3 * model.frame_count() || J.cols() != dyn.n)
        throw DimensionMismatch("jacobian shape mismatch");
    if (!pair.grad_a.allFinite() || pair.grad_a.norm() < 1e-9)
        throw DegenerateGradient("undefined gradient for pair " + pair.id_a + "/" + pair.id_b);

    ConstraintEval out;
    out.id_a = pair.id_a;
    out.id_b = pair.id_b;
    out.category = pair.category;
    out.frame_a = pair.frame_a;
    out.frame_b = pair.frame_b;
    out.phi = phi(spec, pair);

    const Eigen::MatrixXd G = control_map(dyn, x);

    auto frame_rows = [&](int frame) { return J.middleRows(3 * frame, 3); };

    if (spec.order == IndexOrder::Order1) {
        out.grad_p_a = -pair.grad_a;
        out.grad_p_b = -pair.grad_b;
        Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(dyn.n);
        if (pair.frame_a >= 0) row += out.grad_p_a.transpose() * frame_rows(pair.frame_a);
        if (pair.frame_b >= 0) row += out.grad_p_b.transpose() * frame_rows(pair.frame_b);
        out.Lg = row * G;
        out.Lf = 0.0;
        if (pair.frame_a < 0) out.Lf += out.grad_p_a.dot(pair.vel_a);
        if (pair.frame_b < 0) out.Lf += out.grad_p_b.dot(pair.vel_b);
        return out;
    }

    // Order2
    const double c1 = sign_pow_deriv(pair.d, spec.exponent);
    out.grad_p_a = -c1 * pair.grad_a;
    out.grad_p_b = -c1 * pair.grad_b;
    out.grad_v_a = -spec.gain * pair.grad_a;
    out.grad_v_b = -spec.gain * pair.grad_b;

    Eigen::RowVectorXd vrow = Eigen::RowVectorXd::Zero(dyn.n);
    if (pair.frame_a >= 0) vrow += out.grad_v_a.transpose() * frame_rows(pair.frame_a);
    if (pair.frame_b >= 0) vrow += out.grad_v_b.transpose() * frame_rows(pair.frame_b);
    out.Lg = vrow * G;

    // Lf = -c1 * d_dot  (distance term along current velocities)
    //      - k * s      (curvature of d_dot as the geometry moves)
    //      + dphi/dv . (Jdot*qdot + J*accel_drift) per robot endpoint
    double lf = -c1 * pair.d_dot;
    const Eigen::Vector3d rel_v = pair.vel_a - pair.vel_b;
    lf -= spec.gain * rel_v.dot(pair.curvature * rel_v);
    const Eigen::VectorXd hq = accel_drift(dyn, x);
    if (pair.frame_a >= 0) {
        lf += out.grad_v_a.dot(jdot_qdot.segment<3>(3 * pair.frame_a));
        lf += out.grad_v_a.dot(frame_rows(pair.frame_a) * hq);
    }
    if (pair.frame_b >= 0) {
        lf += out.grad_v_b.dot(jdot_qdot.segment<3>(3 * pair.frame_b));
        lf += out.grad_v_b.dot(frame_rows(pair.frame_b) * hq);
    }
    out.Lf = lf;
    return out;
}

std::vector<ConstraintEval> evaluate_constraints(const RobotModel& model,
                                                 const DynamicsModel& dyn,
                                                 const SafetyIndexSpec& spec, const State& x,
                                                 const std::vector<PairDistance>& pairs,
                                                 const Eigen::MatrixXd& J,
                                                 const Eigen::VectorXd& jdot_qdot) {
    std::vector<ConstraintEval> out;
    out.reserve(pairs.size());
    for (const auto& p : pairs)
        out.push_back(lie_derivatives(model, dyn, spec, x, p, J, jdot_qdot));
    return out;
}

}  // namespace safeguard

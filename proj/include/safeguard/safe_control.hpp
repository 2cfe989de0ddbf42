#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "safeguard/dynamics.hpp"
#include "safeguard/safety_index.hpp"

namespace safeguard {

struct QpConstraint {
    Eigen::RowVectorXd a;  // a . u <= b (+ slack)
    double b = 0.0;
    std::string id;
};

// min ||u - u_ref||^2_Q + rho ||s||^2  s.t.  a_i.u <= b_i + s_i, s >= 0,
// lo <= u <= hi. The quadratic slack penalty keeps the problem solvable while
// approximating hard constraints.
struct QPProblem {
    Eigen::VectorXd u_ref;
    Eigen::VectorXd q_weights;  // diagonal of Q_u, entries > 0
    std::vector<QpConstraint> constraints;
    Eigen::VectorXd lo, hi;     // may be empty (no box)
    double slack_penalty = 1e6;
};

enum class SolveStatus { Optimal, SlackRelaxed, MaxIterations };

struct SafeControlResult {
    Eigen::VectorXd u_safe;
    std::vector<std::string> active_set;  // constraint ids with positive multipliers
    Eigen::VectorXd slack_used;
    SolveStatus status = SolveStatus::Optimal;
    double correction_norm = 0.0;  // ||u_safe - u_ref||_Q
    double kkt_residual = 0.0;
};

// Dual coordinate ascent (Hildreth) over the stacked inequality system with
// box limits folded in as rows. Terminates when the largest multiplier update
// in a sweep drops below 1e-8, or after 5000 sweeps (status MaxIterations,
// best iterate returned).
SafeControlResult solve_qp(const QPProblem& p);

enum class Algorithm { Ssa, Cbf, Sss, Pfm, Sma };

Algorithm algorithm_from_string(const std::string& s);
std::string algorithm_name(Algorithm a);

struct FilterParams {
    Algorithm algorithm = Algorithm::Ssa;
    double gain = 0.0;  // eta_ssa | lambda_cbf | lambda_sss | c_pfm | c_sma
    double activation_tolerance = 1e-6;
    double slack_penalty = 1e6;
    double dls_damping = 1e-3;  // PFM joint-space mapping
};

// Shared evaluation context for one control step.
struct FilterContext {
    const DynamicsModel* dyn = nullptr;
    const State* x = nullptr;
    const Eigen::MatrixXd* J = nullptr;  // 3m x n, needed by PFM
    Eigen::VectorXd q_weights;           // empty = identity
};

SafeControlResult ssa_filter(const Eigen::VectorXd& u_ref,
                             const std::vector<ConstraintEval>& constraints,
                             const FilterParams& params, const FilterContext& ctx);
SafeControlResult cbf_filter(const Eigen::VectorXd& u_ref,
                             const std::vector<ConstraintEval>& constraints,
                             const FilterParams& params, const FilterContext& ctx);
SafeControlResult sss_filter(const Eigen::VectorXd& u_ref,
                             const std::vector<ConstraintEval>& constraints,
                             const FilterParams& params, const FilterContext& ctx);
// Cartesian repulsion mapped back through a damped least-squares pseudoinverse
// of (J * control_map); never solves a QP.
SafeControlResult pfm_filter(const Eigen::VectorXd& u_ref,
                             const std::vector<ConstraintEval>& constraints,
                             const FilterParams& params, const FilterContext& ctx);
// Correction along -Lg^T of the most-violated constraint.
SafeControlResult sma_filter(const Eigen::VectorXd& u_ref,
                             const std::vector<ConstraintEval>& constraints,
                             const FilterParams& params, const FilterContext& ctx);

SafeControlResult apply_filter(const Eigen::VectorXd& u_ref,
                               const std::vector<ConstraintEval>& constraints,
                               const FilterParams& params, const FilterContext& ctx);

}  // namespace safeguard

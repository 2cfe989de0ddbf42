#include "safeguard/safe_control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "safeguard/errors.hpp"

namespace safeguard {

namespace {

constexpr double kConvergenceTol = 1e-8;
constexpr int kMaxSweeps = 5000;

struct SparseRow {
    std::vector<int> idx;
    std::vector<double> val;
    double b = 0.0;
    int constraint_index = -1;  // >= 0 for safety rows, -1 for box/slack rows

    double dot(const Eigen::VectorXd& z) const {
        double s = 0.0;
        for (size_t k = 0; k < idx.size(); ++k) s += val[k] * z[idx[k]];
        return s;
    }
};

}  // namespace

SafeControlResult solve_qp(const QPProblem& p) {
    const int nu = static_cast<int>(p.u_ref.size());
    const int ms = static_cast<int>(p.constraints.size());
    if (!p.u_ref.allFinite()) throw NonFiniteProblem("u_ref not finite");
    if (p.q_weights.size() != nu || p.q_weights.minCoeff() <= 0.0)
        throw NonFiniteProblem("q_weights must be positive and sized like u_ref");
    if (!(p.slack_penalty > 0.0)) throw NonFiniteProblem("slack_penalty must be > 0");

    // decision vector z = [u; s]
    const int nz = nu + ms;
    Eigen::VectorXd hdiag(nz);
    hdiag.head(nu) = 2.0 * p.q_weights;
    hdiag.tail(ms).setConstant(2.0 * p.slack_penalty);

    Eigen::VectorXd z(nz);
    z.head(nu) = p.u_ref;
    z.tail(ms).setZero();

    std::vector<SparseRow> rows;
    rows.reserve(static_cast<size_t>(ms) * 2 + static_cast<size_t>(nu) * 2);
    for (int i = 0; i < ms; ++i) {
        const auto& c = p.constraints[i];
        if (c.a.size() != nu || !c.a.allFinite() || !std::isfinite(c.b))
            throw NonFiniteProblem("constraint row " + c.id + " not finite");
        SparseRow r;
        for (int j = 0; j < nu; ++j) {
            if (c.a[j] != 0.0) {
                r.idx.push_back(j);
                r.val.push_back(c.a[j]);
            }
        }
        r.idx.push_back(nu + i);  // a.u - s_i <= b
        r.val.push_back(-1.0);
        r.b = c.b;
        r.constraint_index = i;
        rows.push_back(std::move(r));
    }
    for (int i = 0; i < ms; ++i) {  // -s_i <= 0
        SparseRow r;
        r.idx.push_back(nu + i);
        r.val.push_back(-1.0);
        r.b = 0.0;
        rows.push_back(std::move(r));
    }
    if (p.lo.size() == nu && p.hi.size() == nu) {
        for (int j = 0; j < nu; ++j) {
            if (std::isfinite(p.hi[j])) {
                SparseRow r;
                r.idx.push_back(j);
                r.val.push_back(1.0);
                r.b = p.hi[j];
                rows.push_back(std::move(r));
            }
            if (std::isfinite(p.lo[j])) {
                SparseRow r;
                r.idx.push_back(j);
                r.val.push_back(-1.0);
                r.b = -p.lo[j];
                rows.push_back(std::move(r));
            }
        }
    }

    const int nr = static_cast<int>(rows.size());
    std::vector<double> pii(nr);
    for (int r = 0; r < nr; ++r) {
        double s = 0.0;
        for (size_t k = 0; k < rows[r].idx.size(); ++k)
            s += rows[r].val[k] * rows[r].val[k] / hdiag[rows[r].idx[k]];
        pii[r] = s;
    }

    Eigen::VectorXd lambda = Eigen::VectorXd::Zero(nr);
    bool converged = false;
    for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
        double max_update = 0.0;
        for (int r = 0; r < nr; ++r) {
            const double resid = rows[r].dot(z) - rows[r].b;
            double lam_new = lambda[r] + resid / pii[r];
            if (lam_new < 0.0) lam_new = 0.0;
            const double delta = lam_new - lambda[r];
            if (delta != 0.0) {
                lambda[r] = lam_new;
                for (size_t k = 0; k < rows[r].idx.size(); ++k) {
                    const int j = rows[r].idx[k];
                    z[j] -= delta * rows[r].val[k] / hdiag[j];
                }
                max_update = std::max(max_update, std::abs(delta));
            }
        }
        converged = max_update < kConvergenceTol;
    }

    SafeControlResult out;
    out.u_safe = z.head(nu);
    if (p.lo.size() == nu && p.hi.size() == nu)
        out.u_safe = out.u_safe.cwiseMax(p.lo).cwiseMin(p.hi);
    out.slack_used = z.tail(ms).cwiseMax(0.0);
    for (int r = 0; r < nr; ++r)
        if (rows[r].constraint_index >= 0 && lambda[r] > 1e-10)
            out.active_set.push_back(p.constraints[rows[r].constraint_index].id);

    const Eigen::VectorXd du = out.u_safe - p.u_ref;
    out.correction_norm = std::sqrt(du.dot(p.q_weights.asDiagonal() * du));

    // KKT residual: stationarity, primal feasibility, complementary slackness
    double kkt = 0.0;
    {
        Eigen::VectorXd grad = hdiag.cwiseProduct(z);
        grad.head(nu) -= 2.0 * p.q_weights.cwiseProduct(p.u_ref);
        for (int r = 0; r < nr; ++r)
            for (size_t k = 0; k < rows[r].idx.size(); ++k)
                grad[rows[r].idx[k]] += lambda[r] * rows[r].val[k];
        kkt = grad.cwiseAbs().maxCoeff();
        for (int r = 0; r < nr; ++r) {
            const double viol = rows[r].dot(z) - rows[r].b;
            kkt = std::max(kkt, std::max(0.0, viol));
            kkt = std::max(kkt, std::abs(lambda[r] * viol));
        }
    }
    out.kkt_residual = kkt;

    const double max_slack = ms > 0 ? out.slack_used.maxCoeff() : 0.0;
    if (!converged)
        out.status = SolveStatus::MaxIterations;
    else if (max_slack > 1e-9)
        out.status = SolveStatus::SlackRelaxed;
    else
        out.status = SolveStatus::Optimal;
    return out;
}

Algorithm algorithm_from_string(const std::string& s) {
    if (s == "ssa") return Algorithm::Ssa;
    if (s == "cbf") return Algorithm::Cbf;
    if (s == "sss") return Algorithm::Sss;
    if (s == "pfm") return Algorithm::Pfm;
    if (s == "sma") return Algorithm::Sma;
    throw ValidationError("algo", "unknown algorithm '" + s + "' (ssa|cbf|sss|pfm|sma)");
}

std::string algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::Ssa: return "ssa";
        case Algorithm::Cbf: return "cbf";
        case Algorithm::Sss: return "sss";
        case Algorithm::Pfm: return "pfm";
        case Algorithm::Sma: return "sma";
    }
    return "?";
}

namespace {

Eigen::VectorXd weights_or_identity(const FilterContext& ctx, int nu) {
    if (ctx.q_weights.size() == nu) return ctx.q_weights;
    return Eigen::VectorXd::Ones(nu);
}

std::string constraint_id(const ConstraintEval& c) { return c.id_a + "/" + c.id_b; }

SafeControlResult solve_filter_qp(const Eigen::VectorXd& u_ref,
                                  std::vector<QpConstraint> rows, const FilterParams& params,
                                  const FilterContext& ctx) {
    QPProblem qp;
    qp.u_ref = u_ref;
    qp.q_weights = weights_or_identity(ctx, static_cast<int>(u_ref.size()));
    qp.constraints = std::move(rows);
    qp.lo = ctx.dyn->control_lo;
    qp.hi = ctx.dyn->control_hi;
    qp.slack_penalty = params.slack_penalty;
    return solve_qp(qp);
}

SafeControlResult passthrough(const Eigen::VectorXd& u_ref) {
    SafeControlResult r;
    r.u_safe = u_ref;  // bit-exact identity when no constraint is active
    r.slack_used = Eigen::VectorXd();
    return r;
}

}  // namespace

SafeControlResult ssa_filter(const Eigen::VectorXd& u_ref,
                             const std::vector<ConstraintEval>& constraints,
                             const FilterParams& params, const FilterContext& ctx) {
    std::vector<QpConstraint> rows;
    for (const auto& c : constraints) {
        if (c.phi > params.activation_tolerance) {
            rows.push_back({c.Lg, -params.gain - c.Lf, constraint_id(c)});
        } else if (std::abs(c.phi) <= params.activation_tolerance) {
            rows.push_back({c.Lg, -c.Lf, constraint_id(c)});
        }
    }
    if (rows.empty()) return passthrough(u_ref);
    return solve_filter_qp(u_ref, std::move(rows), params, ctx);
}

SafeControlResult cbf_filter(const Eigen::VectorXd& u_ref,
                             const std::vector<ConstraintEval>& constraints,
                             const FilterParams& params, const FilterContext& ctx) {
    std::vector<QpConstraint> rows;
    rows.reserve(constraints.size());
    for (const auto& c : constraints)
        rows.push_back({c.Lg, -params.gain * c.phi - c.Lf, constraint_id(c)});
    if (rows.empty()) return passthrough(u_ref);
    return solve_filter_qp(u_ref, std::move(rows), params, ctx);
}

SafeControlResult sss_filter(const Eigen::VectorXd& u_ref,
                             const std::vector<ConstraintEval>& constraints,
                             const FilterParams& params, const FilterContext& ctx) {
    std::vector<QpConstraint> rows;
    for (const auto& c : constraints)
        if (c.phi >= -params.activation_tolerance)
            rows.push_back({c.Lg, -params.gain * c.phi - c.Lf, constraint_id(c)});
    if (rows.empty()) return passthrough(u_ref);
    return solve_filter_qp(u_ref, std::move(rows), params, ctx);
}

SafeControlResult pfm_filter(const Eigen::VectorXd& u_ref,
                             const std::vector<ConstraintEval>& constraints,
                             const FilterParams& params, const FilterContext& ctx) {
    const int n = ctx.dyn->n;
    const Eigen::MatrixXd& J = *ctx.J;
    // Repulsion acts on the Cartesian channel the control drives directly:
    // the position gradient for first-order models, the velocity gradient for
    // second-order ones. Contributions from all violated constraints sum.
    std::vector<Eigen::Vector3d> push(J.rows() / 3, Eigen::Vector3d::Zero());
    std::vector<bool> involved(J.rows() / 3, false);
    SafeControlResult out;
    for (const auto& c : constraints) {
        if (c.phi < 0.0) continue;
        out.active_set.push_back(constraint_id(c));
        auto add = [&](int frame, const Eigen::Vector3d& grad) {
            if (frame < 0) return;
            push[frame] -= params.gain * grad;
            involved[frame] = true;
        };
        if (ctx.dyn->order == 1) {
            add(c.frame_a, c.grad_p_a);
            add(c.frame_b, c.grad_p_b);
        } else {
            add(c.frame_a, c.grad_v_a);
            add(c.frame_b, c.grad_v_b);
        }
    }
    if (out.active_set.empty()) return passthrough(u_ref);

    int rows = 0;
    for (bool f : involved) rows += f ? 3 : 0;
    Eigen::MatrixXd A(rows, n);
    Eigen::VectorXd b(rows);
    const Eigen::MatrixXd G = control_map(*ctx.dyn, *ctx.x);
    int at = 0;
    for (size_t f = 0; f < involved.size(); ++f) {
        if (!involved[f]) continue;
        A.middleRows(at, 3) = J.middleRows(3 * static_cast<int>(f), 3) * G;
        b.segment(at, 3) = push[f];
        at += 3;
    }
    const double lam2 = params.dls_damping * params.dls_damping;
    Eigen::MatrixXd AAt = A * A.transpose();
    AAt.diagonal().array() += lam2;
    const Eigen::VectorXd correction = A.transpose() * AAt.ldlt().solve(b);

    out.u_safe = clamp_control(*ctx.dyn, u_ref + correction);
    out.slack_used = Eigen::VectorXd();
    out.status = SolveStatus::Optimal;
    const Eigen::VectorXd w = weights_or_identity(ctx, n);
    const Eigen::VectorXd du = out.u_safe - u_ref;
    out.correction_norm = std::sqrt(du.dot(w.asDiagonal() * du));
    return out;
}

SafeControlResult sma_filter(const Eigen::VectorXd& u_ref,
                             const std::vector<ConstraintEval>& constraints,
                             const FilterParams& params, const FilterContext& ctx) {
    const ConstraintEval* worst = nullptr;
    for (const auto& c : constraints)
        if (!worst || c.phi > worst->phi) worst = &c;
    if (!worst || worst->phi < 0.0) return passthrough(u_ref);

    SafeControlResult out;
    out.u_safe = clamp_control(*ctx.dyn, u_ref - params.gain * worst->Lg.transpose());
    out.active_set.push_back(constraint_id(*worst));
    out.slack_used = Eigen::VectorXd();
    out.status = SolveStatus::Optimal;
    const Eigen::VectorXd w = weights_or_identity(ctx, static_cast<int>(u_ref.size()));
    const Eigen::VectorXd du = out.u_safe - u_ref;
    out.correction_norm = std::sqrt(du.dot(w.asDiagonal() * du));
    return out;
}

SafeControlResult apply_filter(const Eigen::VectorXd& u_ref,
                               const std::vector<ConstraintEval>& constraints,
                               const FilterParams& params, const FilterContext& ctx) {
    switch (params.algorithm) {
        case Algorithm::Ssa: return ssa_filter(u_ref, constraints, params, ctx);
        case Algorithm::Cbf: return cbf_filter(u_ref, constraints, params, ctx);
        case Algorithm::Sss: return sss_filter(u_ref, constraints, params, ctx);
        case Algorithm::Pfm: return pfm_filter(u_ref, constraints, params, ctx);
        case Algorithm::Sma: return sma_filter(u_ref, constraints, params, ctx);
    }
    throw ValidationError("algorithm", "unhandled algorithm");
}

}  // namespace safeguard

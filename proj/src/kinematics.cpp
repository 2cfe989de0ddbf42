#include "safeguard/kinematics.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "safeguard/builtin_data.hpp"
#include "safeguard/errors.hpp"
#include "safeguard/textcfg.hpp"

namespace safeguard {

int RobotModel::frame_index(const std::string& fname) const {
    for (size_t i = 0; i < frames.size(); ++i)
        if (frames[i].name == fname) return static_cast<int>(i);
    return -1;
}

Eigen::VectorXd RobotModel::limits_lo() const {
    Eigen::VectorXd lo(n_dof_);
    for (int j = 0; j < n_dof_; ++j) lo[j] = frames[dof_frames_[j]].limit_lo;
    return lo;
}

Eigen::VectorXd RobotModel::limits_hi() const {
    Eigen::VectorXd hi(n_dof_);
    for (int j = 0; j < n_dof_; ++j) hi[j] = frames[dof_frames_[j]].limit_hi;
    return hi;
}

void RobotModel::finalize() {
    n_dof_ = 0;
    dof_frames_.clear();
    for (size_t i = 0; i < frames.size(); ++i) {
        auto& f = frames[i];
        if (f.parent >= static_cast<int>(i))
            throw ValidationError(f.name, "frames must be topologically ordered");
        if (f.dof >= 0) {
            if (!(f.limit_lo < f.limit_hi))
                throw ValidationError(f.name, "position limits must satisfy lo < hi");
            f.dof = n_dof_++;
            dof_frames_.push_back(static_cast<int>(i));
        }
        if (std::abs(f.origin.q.norm() - 1.0) > 1e-9)
            throw ValidationError(f.name, "origin orientation must be unit norm");
    }
    for (const auto& [i, j] : self_pairs) {
        if (i < 0 || j < 0 || i >= static_cast<int>(volumes.size()) ||
            j >= static_cast<int>(volumes.size()))
            throw ValidationError(name, "self pair references unknown volume");
        if (!volumes[i].self_collision || !volumes[j].self_collision)
            throw ValidationError(name, "self pair references non-self-collision volume");
    }
    left_hand_frame = frame_index("L_ee");
    right_hand_frame = frame_index("R_ee");
}

namespace {

void joint_motion(JointType type, double th, Eigen::Quaterniond& q, Eigen::Vector3d& t) {
    q = Eigen::Quaterniond::Identity();
    t = Eigen::Vector3d::Zero();
    switch (type) {
        case JointType::RevoluteX:
            q = Eigen::Quaterniond(Eigen::AngleAxisd(th, Eigen::Vector3d::UnitX()));
            break;
        case JointType::RevoluteY:
            q = Eigen::Quaterniond(Eigen::AngleAxisd(th, Eigen::Vector3d::UnitY()));
            break;
        case JointType::RevoluteZ:
        case JointType::PlanarYaw:
            q = Eigen::Quaterniond(Eigen::AngleAxisd(th, Eigen::Vector3d::UnitZ()));
            break;
        case JointType::PlanarX:
            t = Eigen::Vector3d(th, 0, 0);
            break;
        case JointType::PlanarY:
            t = Eigen::Vector3d(0, th, 0);
            break;
    }
}

Eigen::Vector3d joint_axis(JointType type) {
    switch (type) {
        case JointType::RevoluteX: return Eigen::Vector3d::UnitX();
        case JointType::RevoluteY: return Eigen::Vector3d::UnitY();
        case JointType::RevoluteZ:
        case JointType::PlanarYaw: return Eigen::Vector3d::UnitZ();
        case JointType::PlanarX: return Eigen::Vector3d::UnitX();
        case JointType::PlanarY: return Eigen::Vector3d::UnitY();
    }
    return Eigen::Vector3d::UnitZ();
}

bool is_translation(JointType type) {
    return type == JointType::PlanarX || type == JointType::PlanarY;
}

}  // namespace

FkResult forward_kinematics(const RobotModel& model, const Eigen::VectorXd& theta) {
    if (theta.size() != model.dof_count())
        throw DimensionMismatch(model.name + ": theta has " + std::to_string(theta.size()) +
                                " entries, expected " + std::to_string(model.dof_count()));
    const int m = model.frame_count();
    FkResult out;
    out.p.resize(3, m);
    out.qs.resize(m);
    for (int i = 0; i < m; ++i) {
        const auto& f = model.frames[i];
        Eigen::Quaterniond pq = Eigen::Quaterniond::Identity();
        Eigen::Vector3d pt = Eigen::Vector3d::Zero();
        if (f.parent >= 0) {
            pq = out.qs[f.parent];
            pt = out.p.col(f.parent);
        }
        Eigen::Quaterniond q = pq * f.origin.q;
        Eigen::Vector3d t = pt + pq * f.origin.t;
        if (f.dof >= 0) {
            Eigen::Quaterniond mq;
            Eigen::Vector3d mt;
            joint_motion(f.joint_type, theta[f.dof], mq, mt);
            t += q * mt;
            q = q * mq;
        }
        out.qs[i] = q;
        out.p.col(i) = t;
    }
    return out;
}

Eigen::MatrixXd jacobian(const RobotModel& model, const Eigen::VectorXd& theta) {
    const FkResult fk = forward_kinematics(model, theta);
    const int m = model.frame_count();
    const int n = model.dof_count();
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(3 * m, n);

    // world-frame axis and anchor point of each joint; for a joint node the
    // motion applies after its origin transform, so the axis lives in the
    // pre-motion frame. For revolute joints the post-motion orientation shares
    // the rotation axis, so using the node's world orientation is exact. For
    // planar joints the axis must exclude the node's own motion rotation
    // (none, since planar nodes translate), but must exclude ancestors' yaw --
    // our mobile bases stack PlanarX/PlanarY at the root so their axes are the
    // world axes by construction.
    std::vector<Eigen::Vector3d> axis(m), anchor(m);
    for (int i = 0; i < m; ++i) {
        const auto& f = model.frames[i];
        if (f.dof < 0) continue;
        Eigen::Quaterniond pre_q = Eigen::Quaterniond::Identity();
        Eigen::Vector3d pre_t = Eigen::Vector3d::Zero();
        if (f.parent >= 0) {
            pre_q = fk.qs[f.parent];
            pre_t = fk.p.col(f.parent);
        }
        pre_q = pre_q * f.origin.q;
        pre_t = pre_t + (f.parent >= 0 ? fk.qs[f.parent] * f.origin.t : f.origin.t);
        axis[i] = pre_q * joint_axis(f.joint_type);
        anchor[i] = pre_t;
    }

    for (int k = 0; k < m; ++k) {
        // walk ancestors of frame k, filling the columns of actuated joints
        for (int i = k; i >= 0; i = model.frames[i].parent) {
            const auto& f = model.frames[i];
            if (f.dof < 0) continue;
            if (is_translation(f.joint_type)) {
                J.block<3, 1>(3 * k, f.dof) = axis[i];
            } else {
                J.block<3, 1>(3 * k, f.dof) =
                    axis[i].cross(Eigen::Vector3d(fk.p.col(k)) - anchor[i]);
            }
        }
    }
    return J;
}

Eigen::VectorXd jacobian_dot_qdot(const RobotModel& model, const Eigen::VectorXd& theta,
                                  const Eigen::VectorXd& theta_dot) {
    if (theta_dot.size() != model.dof_count())
        throw DimensionMismatch(model.name + ": theta_dot size mismatch");
    if (theta_dot.isZero(0.0)) return Eigen::VectorXd::Zero(3 * model.frame_count());
    const double h = 1e-6;
    const Eigen::MatrixXd Jp = jacobian(model, theta + h * theta_dot);
    const Eigen::MatrixXd Jm = jacobian(model, theta - h * theta_dot);
    return ((Jp - Jm) / (2.0 * h)) * theta_dot;
}

std::vector<TaggedVolume> posed_volumes(const RobotModel& model, const FkResult& fk,
                                        const Eigen::VectorXd& frame_velocities) {
    std::vector<TaggedVolume> out;
    out.reserve(model.volumes.size());
    for (const auto& fv : model.volumes) {
        TaggedVolume tv;
        tv.volume = make_sphere(model.frames[fv.frame].name, fk.p.col(fv.frame), fv.radius);
        tv.volume.attachment = fv.frame;
        if (frame_velocities.size() > 0)
            tv.volume.linear_velocity = frame_velocities.segment<3>(3 * fv.frame);
        tv.env_collision = fv.env_collision;
        tv.self_collision = fv.self_collision;
        out.push_back(std::move(tv));
    }
    return out;
}

namespace {

JointType parse_joint_type(const std::string& s, const CfgDoc& doc, int line_no) {
    if (s == "revolute_x") return JointType::RevoluteX;
    if (s == "revolute_y") return JointType::RevoluteY;
    if (s == "revolute_z") return JointType::RevoluteZ;
    if (s == "planar_x") return JointType::PlanarX;
    if (s == "planar_y") return JointType::PlanarY;
    if (s == "planar_yaw") return JointType::PlanarYaw;
    throw ParseError(doc.path, line_no, "unknown joint type '" + s + "'");
}

}  // namespace

RobotModel load_robot_from_text(const std::string& text, const std::string& path) {
    const CfgDoc doc = parse_cfg_text(text, path);
    if (cfg_int(doc, doc.require("schema_version"), 0) != 1)
        throw ValidationError("schema_version", "expected 1 in " + doc.path);
    if (cfg_str(doc, doc.require("type"), 0) != "robot_model")
        throw ValidationError("type", "expected robot_model in " + doc.path);

    RobotModel model;
    model.name = cfg_str(doc, doc.require("name"), 0);
    const std::string base = cfg_str(doc, doc.require("base"), 0);
    if (base == "fixed")
        model.base_kind = BaseKind::Fixed;
    else if (base == "mobile")
        model.base_kind = BaseKind::Mobile;
    else
        throw ValidationError("base", "must be fixed or mobile");

    auto find_parent = [&](const std::string& pname, int line_no) -> int {
        if (pname == "base") return -1;
        const int idx = model.frame_index(pname);
        if (idx < 0) throw ParseError(doc.path, line_no, "unknown parent frame '" + pname + "'");
        return idx;
    };
    auto read_rigid = [&](const CfgLine& l, size_t at) {
        Rigid r;
        r.t << cfg_double(doc, l, at), cfg_double(doc, l, at + 1), cfg_double(doc, l, at + 2);
        r.q = Eigen::Quaterniond(cfg_double(doc, l, at + 3), cfg_double(doc, l, at + 4),
                                 cfg_double(doc, l, at + 5), cfg_double(doc, l, at + 6));
        return r;
    };

    // joint <name> <parent> <type> <x y z qw qx qy qz> <lo> <hi>
    // frame <name> <parent> <x y z qw qx qy qz>
    // declaration order defines both the frame ordering and the dof ordering
    for (const auto& l : doc.lines) {
        if (l.key == "joint") {
            FrameNode f;
            f.name = cfg_str(doc, l, 0);
            f.parent = find_parent(cfg_str(doc, l, 1), l.line_no);
            f.joint_type = parse_joint_type(cfg_str(doc, l, 2), doc, l.line_no);
            f.origin = read_rigid(l, 3);
            f.limit_lo = cfg_double(doc, l, 10);
            f.limit_hi = cfg_double(doc, l, 11);
            f.dof = 0;  // reassigned by finalize()
            model.frames.push_back(std::move(f));
        } else if (l.key == "frame") {
            FrameNode f;
            f.name = cfg_str(doc, l, 0);
            f.parent = find_parent(cfg_str(doc, l, 1), l.line_no);
            f.origin = read_rigid(l, 2);
            f.dof = -1;
            model.frames.push_back(std::move(f));
        }
    }

    // volume <frame> sphere <radius> [env] [self]
    for (const auto* l : doc.all("volume")) {
        FrameVolume fv;
        const std::string fname = cfg_str(doc, *l, 0);
        fv.frame = model.frame_index(fname);
        if (fv.frame < 0) throw ParseError(doc.path, l->line_no, "unknown frame '" + fname + "'");
        if (cfg_str(doc, *l, 1) != "sphere")
            throw ParseError(doc.path, l->line_no, "robot volumes must be spheres");
        fv.radius = cfg_double(doc, *l, 2);
        for (size_t i = 3; i < l->tokens.size(); ++i) {
            if (l->tokens[i] == "env") fv.env_collision = true;
            else if (l->tokens[i] == "self") fv.self_collision = true;
            else throw ParseError(doc.path, l->line_no, "unknown flag '" + l->tokens[i] + "'");
        }
        model.volumes.push_back(fv);
    }

    // selfpair <frameA> <frameB>
    for (const auto* l : doc.all("selfpair")) {
        auto vol_of = [&](const std::string& fname) -> int {
            const int fi = model.frame_index(fname);
            for (size_t v = 0; v < model.volumes.size(); ++v)
                if (model.volumes[v].frame == fi) return static_cast<int>(v);
            throw ParseError(doc.path, l->line_no, "no volume on frame '" + fname + "'");
        };
        model.self_pairs.emplace_back(vol_of(cfg_str(doc, *l, 0)), vol_of(cfg_str(doc, *l, 1)));
    }

    model.finalize();
    return model;
}

RobotModel load_robot_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path, 0, "cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_robot_from_text(buf.str(), path);
}

const std::map<std::string, std::string>& builtin_model_texts() {
    static const std::map<std::string, std::string> texts = [] {
        std::map<std::string, std::string> m;
        for (const auto& [path, content] : builtin_data()) {
            if (path.rfind("robots/", 0) != 0) continue;
            const CfgDoc doc = parse_cfg_text(content, path);
            m.emplace(cfg_str(doc, doc.require("name"), 0), content);
        }
        return m;
    }();
    return texts;
}

const std::map<std::string, RobotConfigEntry>& robot_registry() {
    static const std::map<std::string, RobotConfigEntry> registry = [] {
        static std::map<std::string, RobotModel> models;
        for (const auto& [mname, text] : builtin_model_texts())
            models.emplace(mname, load_robot_from_text(text, "builtin:" + mname));

        std::map<std::string, RobotConfigEntry> reg;
        auto add_entry = [&](const CfgDoc& doc, const std::string& cfg_name,
                             bool sport_alias) {
            RobotConfigEntry e;
            e.name = cfg_name;
            const std::string mname = cfg_str(doc, doc.require("model"), 0);
            auto it = models.find(mname);
            if (it == models.end()) throw ValidationError("model", "unknown model " + mname);
            e.model = &it->second;
            e.dynamics_order = cfg_int(doc, doc.require("dynamics_order"), 0);
            e.dof = e.model->dof_count();
            e.state_dim = e.dynamics_order == 2 ? 2 * e.dof : e.dof;
            e.control_dim = e.dof;
            e.sport_mode_alias = sport_alias;
            reg.emplace(cfg_name, e);
        };
        for (const auto& [path, content] : builtin_data()) {
            if (path.rfind("configs/", 0) != 0) continue;
            const CfgDoc doc = parse_cfg_text(content, path);
            add_entry(doc, cfg_str(doc, doc.require("name"), 0), false);
        }
        // G1SportMode shares the mobile-base model; the learned locomotion
        // mapping is out of scope, so these are flagged aliases.
        for (const std::string order : {"1", "2"}) {
            const CfgDoc doc = parse_cfg_text("schema_version 1\ntype robot_config\nname X\n"
                                              "model g1_mobile_base\ndynamics_order " + order,
                                              "builtin:sport");
            add_entry(doc, "G1SportMode_D" + order, true);
        }
        return reg;
    }();
    return registry;
}

}  // namespace safeguard

#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "safeguard/geometry.hpp"

namespace safeguard {

enum class JointType { RevoluteX, RevoluteY, RevoluteZ, PlanarX, PlanarY, PlanarYaw };
enum class BaseKind { Fixed, Mobile };

struct Rigid {
    Eigen::Quaterniond q = Eigen::Quaterniond::Identity();
    Eigen::Vector3d t = Eigen::Vector3d::Zero();
};

// One node of the kinematic tree. Joint nodes carry dof >= 0 (the column in
// theta); fixed frames have dof = -1 and contribute geometry only.
struct FrameNode {
    std::string name;
    int parent = -1;  // -1 = world
    int dof = -1;
    JointType joint_type = JointType::RevoluteZ;
    Rigid origin;
    double limit_lo = 0.0, limit_hi = 0.0;  // joint nodes only
};

struct FrameVolume {
    int frame = -1;
    double radius = 0.0;
    bool env_collision = false;
    bool self_collision = false;
};

struct RobotModel {
    std::string name;
    BaseKind base_kind = BaseKind::Fixed;
    std::vector<FrameNode> frames;          // topologically ordered (parent < child)
    std::vector<FrameVolume> volumes;       // at most one per frame
    std::vector<std::pair<int, int>> self_pairs;  // indices into volumes
    int left_hand_frame = -1, right_hand_frame = -1;

    int dof_count() const { return n_dof_; }
    int frame_count() const { return static_cast<int>(frames.size()); }
    int frame_index(const std::string& name) const;  // -1 when absent
    const std::vector<int>& dof_frames() const { return dof_frames_; }

    Eigen::VectorXd limits_lo() const;
    Eigen::VectorXd limits_hi() const;

    // Call after filling frames/volumes/self_pairs; validates the tree and
    // assigns dof indexing in declaration order.
    void finalize();

private:
    int n_dof_ = 0;
    std::vector<int> dof_frames_;  // dof index -> frame index
};

struct FkResult {
    Eigen::Matrix3Xd p;                      // 3 x m frame positions, world
    std::vector<Eigen::Quaterniond> qs;      // frame orientations
};

FkResult forward_kinematics(const RobotModel& model, const Eigen::VectorXd& theta);

// Positional Jacobian stacking all frames: rows 3k..3k+2 belong to frame k.
Eigen::MatrixXd jacobian(const RobotModel& model, const Eigen::VectorXd& theta);

// dJ/dt * theta_dot via directional finite difference (h = 1e-6).
Eigen::VectorXd jacobian_dot_qdot(const RobotModel& model, const Eigen::VectorXd& theta,
                                  const Eigen::VectorXd& theta_dot);

// Volumes posed at the FK frame positions; frame_velocities may be empty
// (treated as zero) or a 3m vector of world-frame linear velocities.
std::vector<TaggedVolume> posed_volumes(const RobotModel& model, const FkResult& fk,
                                        const Eigen::VectorXd& frame_velocities = {});

// Robot model file parsing (schema: docs/config_format.md).
RobotModel load_robot_from_text(const std::string& text, const std::string& path);
RobotModel load_robot_from_file(const std::string& path);

struct RobotConfigEntry {
    std::string name;
    const RobotModel* model = nullptr;
    int dynamics_order = 1;
    int dof = 0, state_dim = 0, control_dim = 0;
    bool sport_mode_alias = false;
};

// Built-in configurations: G1RightArm/G1FixedBase/G1MobileBase x D1/D2 plus
// the G1SportMode aliases of the mobile models.
const std::map<std::string, RobotConfigEntry>& robot_registry();

// Embedded model file text, keyed by model name (also shipped under models/).
const std::map<std::string, std::string>& builtin_model_texts();

}  // namespace safeguard

#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace safeguard {

enum class VolumeKind { Sphere, Box };

// Collision primitive with pose and velocity. attachment < 0 means the volume
// lives in the world (an obstacle); otherwise it rides the robot frame with
// that index.
struct Volume {
    std::string id;
    VolumeKind kind = VolumeKind::Sphere;
    Eigen::Vector3d center = Eigen::Vector3d::Zero();
    Eigen::Quaterniond orientation = Eigen::Quaterniond::Identity();  // Box only
    double radius = 0.0;                                  // Sphere
    Eigen::Vector3d edges = Eigen::Vector3d::Zero();      // Box edge lengths
    Eigen::Vector3d linear_velocity = Eigen::Vector3d::Zero();
    int attachment = -1;

    void validate() const;  // throws ValidationError on bad size/orientation
};

Volume make_sphere(std::string id, const Eigen::Vector3d& center, double radius);
Volume make_box(std::string id, const Eigen::Vector3d& center, const Eigen::Vector3d& edges,
                const Eigen::Quaterniond& orientation = Eigen::Quaterniond::Identity());

enum class PairCategory { Env, Self };

// Signed surface-to-surface distance of one volume pair plus its analytic
// gradients w.r.t. the two centers and the distance rate induced by the stored
// volume velocities. For sphere pairs grad_a = -grad_b and both are unit.
struct PairDistance {
    std::string id_a, id_b;
    PairCategory category = PairCategory::Env;
    double d = 0.0;
    Eigen::Vector3d grad_a = Eigen::Vector3d::Zero();  // d(d)/d(center_a)
    Eigen::Vector3d grad_b = Eigen::Vector3d::Zero();  // d(d)/d(center_b)
    double d_dot = 0.0;
    // Hessian of d w.r.t. center_a (equals the Hessian w.r.t. the relative
    // center offset); zero on flat contact and inside boxes. Needed for the
    // velocity-curvature term of d_ddot in second-order safety indices.
    Eigen::Matrix3d curvature = Eigen::Matrix3d::Zero();
    // carried through for constraint assembly
    int frame_a = -1, frame_b = -1;
    Eigen::Vector3d vel_a = Eigen::Vector3d::Zero();
    Eigen::Vector3d vel_b = Eigen::Vector3d::Zero();
};

// Sphere-Sphere or Sphere-Box signed distance (Box-Box throws UnsupportedPair;
// exactly coincident centers throw DegenerateConfiguration). Negative values
// mean interpenetration; inside a box the distance keeps decreasing via the
// nearest-face depth.
PairDistance signed_distance(const Volume& a, const Volume& b);

struct TaggedVolume {
    Volume volume;
    bool env_collision = false;
    bool self_collision = false;
};

// One PairDistance per (EnvCollision robot volume x environment volume) plus
// one per listed self pair. Output order is deterministic: the env block
// sorted lexicographically by (id_a, id_b), then the self block likewise.
std::vector<PairDistance> all_pairs(const std::vector<TaggedVolume>& robot_volumes,
                                    const std::vector<Volume>& env_volumes,
                                    const std::vector<std::pair<int, int>>& self_pairs);

}  // namespace safeguard

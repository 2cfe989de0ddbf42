#include "safeguard/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "safeguard/errors.hpp"

namespace safeguard {

namespace {
constexpr double kCoincidentTol = 1e-12;
}

void Volume::validate() const {
    if (kind == VolumeKind::Sphere) {
        if (!(radius > 0.0)) throw ValidationError(id, "sphere radius must be > 0");
    } else {
        if (!(edges.minCoeff() > 0.0)) throw ValidationError(id, "box edges must be > 0");
        if (std::abs(orientation.norm() - 1.0) > 1e-9)
            throw ValidationError(id, "box orientation must be unit norm");
    }
}

Volume make_sphere(std::string id, const Eigen::Vector3d& center, double radius) {
    Volume v;
    v.id = std::move(id);
    v.kind = VolumeKind::Sphere;
    v.center = center;
    v.radius = radius;
    v.validate();
    return v;
}

Volume make_box(std::string id, const Eigen::Vector3d& center, const Eigen::Vector3d& edges,
                const Eigen::Quaterniond& orientation) {
    Volume v;
    v.id = std::move(id);
    v.kind = VolumeKind::Box;
    v.center = center;
    v.edges = edges;
    v.orientation = orientation.normalized();
    v.validate();
    return v;
}

namespace {

struct DistResult {
    double d;
    Eigen::Vector3d grad_a;  // w.r.t. first argument's center
    Eigen::Matrix3d curvature = Eigen::Matrix3d::Zero();
};

DistResult sphere_sphere(const Volume& a, const Volume& b) {
    const Eigen::Vector3d delta = a.center - b.center;
    const double dist = delta.norm();
    if (dist < kCoincidentTol)
        throw DegenerateConfiguration("coincident centers for pair " + a.id + "/" + b.id);
    const Eigen::Vector3d e = delta / dist;
    DistResult r;
    r.d = dist - a.radius - b.radius;
    r.grad_a = e;
    r.curvature = (Eigen::Matrix3d::Identity() - e * e.transpose()) / dist;
    return r;
}

// sphere s against box b; gradient returned w.r.t. the sphere center
DistResult sphere_box(const Volume& s, const Volume& b) {
    if ((s.center - b.center).norm() < kCoincidentTol)
        throw DegenerateConfiguration("coincident centers for pair " + s.id + "/" + b.id);
    const Eigen::Matrix3d rot = b.orientation.toRotationMatrix();
    const Eigen::Vector3d local = rot.transpose() * (s.center - b.center);
    const Eigen::Vector3d half = 0.5 * b.edges;

    Eigen::Vector3d clamped;
    bool inside = true;
    for (int i = 0; i < 3; ++i) {
        clamped[i] = std::clamp(local[i], -half[i], half[i]);
        inside = inside && (clamped[i] == local[i]);
    }

    if (!inside) {
        const Eigen::Vector3d delta = local - clamped;
        const double dist = delta.norm();
        const Eigen::Vector3d e = delta / dist;
        Eigen::Matrix3d outside_mask = Eigen::Matrix3d::Zero();
        for (int i = 0; i < 3; ++i) outside_mask(i, i) = (clamped[i] != local[i]) ? 1.0 : 0.0;
        DistResult r;
        r.d = dist - s.radius;
        r.grad_a = rot * e;
        r.curvature = rot *
                      (outside_mask * (Eigen::Matrix3d::Identity() - e * e.transpose()) *
                       outside_mask / dist) *
                      rot.transpose();
        return r;
    }

    // sphere center inside the box: distance continues negative via the
    // nearest-face depth so penetration stays meaningful
    int face = 0;
    double depth = half[0] - std::abs(local[0]);
    for (int i = 1; i < 3; ++i) {
        const double di = half[i] - std::abs(local[i]);
        if (di < depth) {
            depth = di;
            face = i;
        }
    }
    Eigen::Vector3d grad_local = Eigen::Vector3d::Zero();
    grad_local[face] = (local[face] >= 0.0) ? 1.0 : -1.0;
    DistResult r;
    r.d = -depth - s.radius;
    r.grad_a = rot * grad_local;
    return r;
}

}  // namespace

PairDistance signed_distance(const Volume& a, const Volume& b) {
    PairDistance out;
    out.id_a = a.id;
    out.id_b = b.id;
    out.frame_a = a.attachment;
    out.frame_b = b.attachment;
    out.vel_a = a.linear_velocity;
    out.vel_b = b.linear_velocity;

    DistResult r{};
    if (a.kind == VolumeKind::Sphere && b.kind == VolumeKind::Sphere) {
        r = sphere_sphere(a, b);
    } else if (a.kind == VolumeKind::Sphere && b.kind == VolumeKind::Box) {
        r = sphere_box(a, b);
    } else if (a.kind == VolumeKind::Box && b.kind == VolumeKind::Sphere) {
        const DistResult rs = sphere_box(b, a);
        r = {rs.d, -rs.grad_a};
    } else {
        throw UnsupportedPair("box-box pair " + a.id + "/" + b.id);
    }

    out.d = r.d;
    out.grad_a = r.grad_a;
    out.grad_b = -r.grad_a;
    out.curvature = r.curvature;
    out.d_dot = out.grad_a.dot(out.vel_a) + out.grad_b.dot(out.vel_b);
    return out;
}

std::vector<PairDistance> all_pairs(const std::vector<TaggedVolume>& robot_volumes,
                                    const std::vector<Volume>& env_volumes,
                                    const std::vector<std::pair<int, int>>& self_pairs) {
    std::vector<PairDistance> out;
    out.reserve(robot_volumes.size() * env_volumes.size() + self_pairs.size());

    std::vector<PairDistance> block;
    for (const auto& rv : robot_volumes) {
        if (!rv.env_collision) continue;
        for (const auto& ob : env_volumes) {
            try {
                PairDistance p = signed_distance(rv.volume, ob);
                p.category = PairCategory::Env;
                block.push_back(std::move(p));
            } catch (const Error& e) {
                throw DegenerateConfiguration(std::string(e.what()) + " (env pair " +
                                              rv.volume.id + "/" + ob.id + ")");
            }
        }
    }
    auto by_ids = [](const PairDistance& x, const PairDistance& y) {
        return std::tie(x.id_a, x.id_b) < std::tie(y.id_a, y.id_b);
    };
    std::sort(block.begin(), block.end(), by_ids);
    out.insert(out.end(), block.begin(), block.end());

    block.clear();
    for (const auto& [i, j] : self_pairs) {
        const auto& va = robot_volumes.at(i);
        const auto& vb = robot_volumes.at(j);
        try {
            PairDistance p = signed_distance(va.volume, vb.volume);
            p.category = PairCategory::Self;
            block.push_back(std::move(p));
        } catch (const Error& e) {
            throw DegenerateConfiguration(std::string(e.what()) + " (self pair " +
                                          va.volume.id + "/" + vb.volume.id + ")");
        }
    }
    std::sort(block.begin(), block.end(), by_ids);
    out.insert(out.end(), block.begin(), block.end());
    return out;
}

}  // namespace safeguard

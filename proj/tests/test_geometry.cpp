#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "safeguard/errors.hpp"
#include "safeguard/geometry.hpp"
#include "safeguard/kinematics.hpp"
#include "safeguard/rng.hpp"

using namespace safeguard;
using Eigen::Vector3d;

namespace {

Volume random_sphere(Rng& rng, const std::string& id) {
    return make_sphere(id, rng.uniform_box(Vector3d(-1, -1, -1), Vector3d(1, 1, 1)),
                       rng.uniform(0.02, 0.3));
}

Volume random_box(Rng& rng, const std::string& id) {
    const Vector3d edges(rng.uniform(0.05, 0.5), rng.uniform(0.05, 0.5),
                         rng.uniform(0.05, 0.5));
    Eigen::Quaterniond q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
    q.normalize();
    return make_box(id, rng.uniform_box(Vector3d(-1, -1, -1), Vector3d(1, 1, 1)), edges, q);
}

double fd_grad(const Volume& a, const Volume& b, int wrt, int axis, double h = 1e-6) {
    Volume ap = a, am = a, bp = b, bm = b;
    if (wrt == 0) {
        ap.center[axis] += h;
        am.center[axis] -= h;
        return (signed_distance(ap, b).d - signed_distance(am, b).d) / (2 * h);
    }
    bp.center[axis] += h;
    bm.center[axis] -= h;
    return (signed_distance(a, bp).d - signed_distance(a, bm).d) / (2 * h);
}

// min over sampled surface points of the second volume minus the first's radius
double sampling_oracle(const Volume& sphere, const Volume& box, int grid) {
    const Eigen::Matrix3d rot = box.orientation.toRotationMatrix();
    const Vector3d half = 0.5 * box.edges;
    double best = std::numeric_limits<double>::infinity();
    for (int face = 0; face < 6; ++face) {
        const int ax = face / 2;
        const double s = (face % 2 == 0) ? 1.0 : -1.0;
        for (int i = 0; i <= grid; ++i) {
            for (int j = 0; j <= grid; ++j) {
                Vector3d local;
                local[ax] = s * half[ax];
                local[(ax + 1) % 3] = half[(ax + 1) % 3] * (2.0 * i / grid - 1.0);
                local[(ax + 2) % 3] = half[(ax + 2) % 3] * (2.0 * j / grid - 1.0);
                const Vector3d world = box.center + rot * local;
                best = std::min(best, (world - sphere.center).norm());
            }
        }
    }
    return best - sphere.radius;
}

}  // namespace

TEST_CASE("sphere-sphere surface gap and gradient") {
    const Volume a = make_sphere("a", Vector3d(0, 0, 0), 0.05);
    const Volume b = make_sphere("b", Vector3d(0.2, 0, 0), 0.05);
    const PairDistance p = signed_distance(a, b);
    CHECK(p.d == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(p.grad_a.isApprox(Vector3d(-1, 0, 0), 1e-12));
    CHECK(p.grad_b.isApprox(Vector3d(1, 0, 0), 1e-12));
}

TEST_CASE("sphere-box closest-point clamp") {
    const Volume s = make_sphere("s", Vector3d(0, 0, 0), 0.05);
    const Volume b = make_box("b", Vector3d(0.5, 0, 0), Vector3d(0.2, 0.2, 0.2));
    const PairDistance p = signed_distance(s, b);
    CHECK(p.d == doctest::Approx(0.35).epsilon(1e-12));
    CHECK(p.grad_a.isApprox(Vector3d(-1, 0, 0), 1e-12));
    // cross-check with a dense surface-sampling oracle
    CHECK(std::abs(p.d - sampling_oracle(s, b, 300)) < 1e-3);
}

TEST_CASE("coincident centers raise DegenerateConfiguration") {
    const Volume a = make_sphere("a", Vector3d(0, 0, 0), 0.05);
    const Volume b = make_sphere("b", Vector3d(0, 0, 0), 0.05);
    CHECK_THROWS_AS(signed_distance(a, b), DegenerateConfiguration);
}

TEST_CASE("box-box pairs are rejected") {
    const Volume a = make_box("a", Vector3d(0, 0, 0), Vector3d(0.1, 0.1, 0.1));
    const Volume b = make_box("b", Vector3d(1, 0, 0), Vector3d(0.1, 0.1, 0.1));
    CHECK_THROWS_AS(signed_distance(a, b), UnsupportedPair);
}

TEST_CASE("sphere inside box goes negative via nearest-face depth") {
    const Volume b = make_box("b", Vector3d(0, 0, 0), Vector3d(0.4, 0.4, 0.4));
    const Volume s = make_sphere("s", Vector3d(0.15, 0, 0), 0.05);
    const PairDistance p = signed_distance(s, b);
    CHECK(p.d == doctest::Approx(-0.1).epsilon(1e-12));
    CHECK(p.grad_a.isApprox(Vector3d(1, 0, 0), 1e-12));
}

TEST_CASE("symmetry: d(a,b) == d(b,a)") {
    Rng rng(7);
    for (int k = 0; k < 200; ++k) {
        const Volume a = random_sphere(rng, "a");
        const Volume b = (k % 2 == 0) ? random_sphere(rng, "b") : random_box(rng, "b");
        if ((a.center - b.center).norm() < 1e-6) continue;
        CHECK(std::abs(signed_distance(a, b).d - signed_distance(b, a).d) < 1e-12);
    }
}

TEST_CASE("gradients match central finite differences") {
    Rng rng(11);
    int checked = 0;
    while (checked < 100) {
        const Volume a = random_sphere(rng, "a");
        const Volume b = (checked % 2 == 0) ? random_sphere(rng, "b") : random_box(rng, "b");
        PairDistance p;
        try {
            p = signed_distance(a, b);
        } catch (const Error&) {
            continue;
        }
        if (p.d < 1e-3) continue;  // keep away from the kink at contact
        for (int axis = 0; axis < 3; ++axis) {
            CHECK(std::abs(p.grad_a[axis] - fd_grad(a, b, 0, axis)) < 1e-5);
            CHECK(std::abs(p.grad_b[axis] - fd_grad(a, b, 1, axis)) < 1e-5);
        }
        ++checked;
    }
}

TEST_CASE("d_dot matches the finite-difference distance rate") {
    Rng rng(13);
    for (int k = 0; k < 100; ++k) {
        Volume a = random_sphere(rng, "a");
        Volume b = (k % 2 == 0) ? random_sphere(rng, "b") : random_box(rng, "b");
        a.linear_velocity = rng.normal3();
        b.linear_velocity = rng.normal3();
        PairDistance p;
        try {
            p = signed_distance(a, b);
        } catch (const Error&) {
            continue;
        }
        if (std::abs(p.d) < 1e-3) continue;
        const double h = 1e-5;
        Volume ap = a, am = a, bp = b, bm = b;
        ap.center += h * a.linear_velocity;
        am.center -= h * a.linear_velocity;
        bp.center += h * b.linear_velocity;
        bm.center -= h * b.linear_velocity;
        const double rate =
            (signed_distance(ap, bp).d - signed_distance(am, bm).d) / (2 * h);
        CHECK(std::abs(p.d_dot - rate) < 1e-6);
    }
}

TEST_CASE("curvature matches the second directional derivative of d") {
    Rng rng(17);
    int checked = 0;
    while (checked < 60) {
        Volume a = random_sphere(rng, "a");
        Volume b = (checked % 2 == 0) ? random_sphere(rng, "b") : random_box(rng, "b");
        const Vector3d dir = rng.unit_vector();
        PairDistance p;
        try {
            p = signed_distance(a, b);
        } catch (const Error&) {
            continue;
        }
        if (p.d < 5e-2) continue;
        const double h = 1e-4;
        Volume ap = a, am = a;
        ap.center += h * dir;
        am.center -= h * dir;
        double d2;
        try {
            d2 = (signed_distance(ap, b).d - 2 * p.d + signed_distance(am, b).d) / (h * h);
        } catch (const Error&) {
            continue;
        }
        const double analytic = dir.dot(p.curvature * dir);
        // skip samples whose perturbation crosses a clamp-region boundary
        if (std::abs(analytic - d2) > 1e-3 &&
            (signed_distance(ap, b).grad_a - signed_distance(am, b).grad_a).norm() > 10 * h)
            continue;
        CHECK(std::abs(analytic - d2) < 1e-3);
        ++checked;
    }
}

TEST_CASE("sampling oracle agrees on random sphere-box pairs") {
    Rng rng(19);
    int checked = 0;
    while (checked < 20) {
        const Volume s = random_sphere(rng, "s");
        const Volume b = random_box(rng, "b");
        PairDistance p;
        try {
            p = signed_distance(s, b);
        } catch (const Error&) {
            continue;
        }
        if (p.d < 0.01) continue;  // oracle is surface-distance based
        CHECK(std::abs(p.d - sampling_oracle(s, b, 400)) < 1e-3);
        ++checked;
    }
}

TEST_CASE("all_pairs cardinality and deterministic order") {
    std::vector<TaggedVolume> robot;
    for (int i = 0; i < 2; ++i) {
        TaggedVolume tv;
        tv.volume = make_sphere("r" + std::to_string(i), Vector3d(0, 0, 0.3 * i + 0.1), 0.05);
        tv.env_collision = true;
        robot.push_back(tv);
    }
    std::vector<Volume> env;
    for (int i = 0; i < 3; ++i)
        env.push_back(make_sphere("o" + std::to_string(i), Vector3d(1.0 + i, 0, 0), 0.05));

    const auto pairs = all_pairs(robot, env, {});
    REQUIRE(pairs.size() == 6);
    for (const auto& p : pairs) CHECK(p.category == PairCategory::Env);
    for (size_t k = 1; k < pairs.size(); ++k)
        CHECK(std::tie(pairs[k - 1].id_a, pairs[k - 1].id_b) <
              std::tie(pairs[k].id_a, pairs[k].id_b));
}

TEST_CASE("registry volumes: 19 env volumes -> 190 env pairs, 29 self pairs") {
    const auto& entry = robot_registry().at("G1FixedBase_D1");
    const RobotModel& model = *entry.model;
    const FkResult fk = forward_kinematics(model, Eigen::VectorXd::Zero(model.dof_count()));
    const auto robot = posed_volumes(model, fk);

    int env_flagged = 0;
    for (const auto& tv : robot) env_flagged += tv.env_collision ? 1 : 0;
    CHECK(env_flagged == 19);
    CHECK(model.self_pairs.size() == 29);

    std::vector<Volume> obstacles;
    for (int i = 0; i < 10; ++i)
        obstacles.push_back(make_sphere("o" + std::to_string(i), Vector3d(2.0 + i, 0, 0), 0.05));
    const auto pairs = all_pairs(robot, obstacles, model.self_pairs);
    int env_pairs = 0, self_pairs = 0;
    for (const auto& p : pairs)
        (p.category == PairCategory::Env ? env_pairs : self_pairs) += 1;
    CHECK(env_pairs == 190);
    CHECK(self_pairs == 29);
}

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace safeguard {

// Deterministic random source. All sampled quantities are derived from raw
// mt19937_64 draws with fixed arithmetic, so sequences are reproducible for a
// given seed across platforms and standard library implementations (the
// std::*_distribution classes make no such guarantee).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // uniform in [0, 1)
    double uniform01() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    int uniform_int(int lo, int hi) {  // inclusive bounds
        const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(gen_() % span);
    }

    // standard normal via Box-Muller
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        double u2 = uniform01();
        while (u1 <= 1e-300) u1 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    Eigen::Vector3d normal3() {
        Eigen::Vector3d z;
        z << normal(), normal(), normal();
        return z;
    }

    Eigen::Vector3d uniform_box(const Eigen::Vector3d& lo, const Eigen::Vector3d& hi) {
        Eigen::Vector3d p;
        for (int i = 0; i < 3; ++i) p[i] = uniform(lo[i], hi[i]);
        return p;
    }

    // uniform direction on the unit sphere
    Eigen::Vector3d unit_vector() {
        Eigen::Vector3d v = normal3();
        double n = v.norm();
        while (n < 1e-12) {
            v = normal3();
            n = v.norm();
        }
        return v / n;
    }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace safeguard

/// Deterministic random sampling for hypothesis certification. All draws are
/// fully specified (Box-Muller over explicit 53-bit uniforms) so that a failed
/// check's witness point is reproducible from the recorded 64-bit seed.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace cnls {

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    /// Uniform in (0,1].
    double uniform() {
        const std::uint64_t bits = (eng_() >> 11) + 1;  // 1 .. 2^53
        return static_cast<double>(bits) * 0x1p-53;
    }

    /// Standard real normal N(0,1).
    double normal() {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Standard complex Gaussian CN(0,1): E|z|^2 = 1.
    std::complex<double> cgauss() {
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-std::log(u1));  // sqrt(-2 ln u)/sqrt(2)
        const double th = 2.0 * std::numbers::pi * u2;
        return {r * std::cos(th), r * std::sin(th)};
    }

    std::vector<std::complex<double>> cgauss_vec(int n) {
        std::vector<std::complex<double>> z(n);
        for (auto& zi : z) zi = cgauss();
        return z;
    }

    std::vector<double> normal_vec(int n) {
        std::vector<double> y(n);
        for (auto& yi : y) yi = normal();
        return y;
    }

  private:
    std::mt19937_64 eng_;
};

}  // namespace cnls

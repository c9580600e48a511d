#pragma once

#include <complex>
#include <cstdint>

namespace ncrsense {

/// Counter-free deterministic random streams. All randomness in the library
/// derives from (seed, purpose tag, indices) through splitmix64, so draws are
/// reproducible bit-for-bit regardless of call interleaving or worker count.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Hash-combine a seed with a stream tag or index.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag) {
    return splitmix64(seed ^ (0x9e3779b97f4a7c15ULL + splitmix64(tag)));
}

/// Small counter-based generator: stateless apart from an advancing counter,
/// cheap to fork per purpose.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(splitmix64(seed)) {}

    std::uint64_t next_u64() {
        state_ = splitmix64(state_);
        return state_;
    }

    /// Uniform double in (0, 1]; never returns 0 so it is safe under log().
    double next_unit_open() {
        const std::uint64_t bits = next_u64() >> 11; // 53 random bits
        return (static_cast<double>(bits) + 1.0) * 0x1p-53;
    }

    /// Uniform double in [0, 1).
    double next_unit() {
        const std::uint64_t bits = next_u64() >> 11;
        return static_cast<double>(bits) * 0x1p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    /// Standard normal pair via Box-Muller.
    void next_normal_pair(double &z0, double &z1) {
        const double u1 = next_unit_open();
        const double u2 = next_unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double phi = 2.0 * M_PI * u2;
        z0 = r * std::cos(phi);
        z1 = r * std::sin(phi);
    }

    double next_normal() {
        double z0 = 0.0, z1 = 0.0;
        next_normal_pair(z0, z1);
        return z0;
    }

    /// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
    std::complex<double> next_cn(double variance) {
        double z0 = 0.0, z1 = 0.0;
        next_normal_pair(z0, z1);
        const double s = std::sqrt(variance / 2.0);
        return {s * z0, s * z1};
    }

  private:
    std::uint64_t state_;
};

} // namespace ncrsense

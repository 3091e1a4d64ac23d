#pragma once
// Deterministic randomness utilities.
//
// Everything random in this library flows through Rng, a thin wrapper over
// std::mt19937_64 (whose output sequence the standard fully specifies) with
// hand-rolled sampling on top, so a seed means the same stream everywhere.
// Trial t of an experiment uses derive_seed(master_seed, t): a pure function,
// so trials are individually reproducible and independent of which worker
// runs them.

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace tailbound {

// splitmix64 finalizer (Steele, Lea & Flood).
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Seed for a numbered stream (trial index, data-generation stream, ...)
// derived from the master seed. Pure function of its arguments.
inline std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t stream) {
    return mix64(master_seed ^ mix64(stream));
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Unbiased integer in [0, n), by masked rejection.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw std::domain_error("Rng::below: n must be positive");
        std::uint64_t mask = n - 1;
        mask |= mask >> 1;
        mask |= mask >> 2;
        mask |= mask >> 4;
        mask |= mask >> 8;
        mask |= mask >> 16;
        mask |= mask >> 32;
        for (;;) {
            const std::uint64_t v = next_u64() & mask;
            if (v < n) return v;
        }
    }

    // Standard normal, Box-Muller. The second variate of each pair is cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform01();  // (0, 1], keeps the log finite
        const double u2 = uniform01();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * kPi * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

  private:
    static constexpr double kPi = 3.141592653589793238462643383279502884;
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace tailbound

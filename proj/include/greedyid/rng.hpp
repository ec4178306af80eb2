#pragma once

#include <cmath>
#include <cstdint>

namespace greedyid {

// SplitMix64 counter generator (Steele/Lea/Flood mixing constants).
// Output i is a pure function of (seed, stream, i), so parallel runs that
// draw from their own stream are reproducible regardless of scheduling.
class SplitMix64 {
  public:
    SplitMix64() : SplitMix64(0, 0) {}
    SplitMix64(std::uint64_t seed, std::uint64_t stream)
        : state_(mix(mix(seed) ^ mix(stream ^ 0x9e3779b97f4a7c15ull))) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        return mix(state_);
    }

    // uniform in [0, 1)
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // standard normal via Box-Muller
    double normal() {
        double u1 = next_double();
        double u2 = next_double();
        while (u1 <= 0.0) u1 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    // integer in [0, n)
    std::uint64_t next_below(std::uint64_t n) {
        return next_u64() % n;  // bias negligible for n << 2^64
    }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

}  // namespace greedyid

#pragma once

#include <cstdint>

namespace qcrl {

// Small deterministic generator (splitmix64). The standard distributions
// are implementation-defined, so sampling goes through explicit transforms
// to keep outputs bitwise stable across toolchains.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Standard normal via Box-Muller (one value per call; no state carried).
    double normal();

    // Derive an independent stream for an indexed sub-task.
    static Rng derive(std::uint64_t seed, std::uint64_t index) {
        Rng mix(seed ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
        return Rng(mix.next_u64());
    }

  private:
    std::uint64_t state_;
};

}  // namespace qcrl

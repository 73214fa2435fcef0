#pragma once

#include <cstdint>

namespace thermoform {

// Counter-based splittable generator built on splitmix64. Streams derived
// from (seed, stream) are independent for distinct stream indices, so
// parallel chains stay reproducible regardless of scheduling.
class SplitRng {
 public:
  explicit SplitRng(std::uint64_t seed, std::uint64_t stream = 0)
      : state_(mix(seed ^ mix(stream + 0x9e3779b97f4a7c15ULL))) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  // Uniform in [0,1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform in [-1,1).
  double next_symmetric() { return 2.0 * next_double() - 1.0; }

  SplitRng split(std::uint64_t stream) const {
    return SplitRng(state_, stream);
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  std::uint64_t state_;
};

}  // namespace thermoform

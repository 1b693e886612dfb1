#pragma once

#include <cstdint>
#include <random>

namespace voxquad {

/// splitmix64 finalizer; used to decorrelate per-voxel / per-element streams.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed of the independent stream owned by `index`. `salt` separates families
/// of streams (voxels vs elements) drawn from the same user seed.
constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index, std::uint64_t salt) {
  return seed ^ mix64(index ^ mix64(salt));
}

/// Deterministic uniform generator. Doubles are built from the top 53 bits so
/// that sequences do not depend on the standard library's distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace voxquad

#pragma once

#include <cstdint>
#include <vector>

namespace rrg {

// xoshiro256** with splitmix64 seeding. Self-contained so that streams are
// reproducible across platforms and standard-library versions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) { reseed(seed); }

  void reseed(std::uint64_t seed);

  std::uint64_t next_u64();

  // Uniform on [0, bound), bound > 0. Debiased (Lemire's method).
  std::uint64_t next_below(std::uint64_t bound);

  // Uniform on [0, 1) with 53-bit resolution.
  double next_double();

  // Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(next_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t s_[4];
};

// Deterministic per-sample stream: sample k of a run seeded with `seed` uses
// derive_stream(seed, k), so parallel schedules cannot change results.
std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t index);

}  // namespace rrg

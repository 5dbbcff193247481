#pragma once

#include <cstdint>
#include <string_view>

namespace polyham {

/// Seeded, splittable random stream (xoshiro256** seeded through SplitMix64).
///
/// Every derived stream is a pure function of the parent seed and a label, so
/// results are reproducible from (seed, spec) regardless of call order in
/// sibling streams. Integer draws use Lemire's multiply-shift rejection so the
/// output does not depend on the standard library's distribution code.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64();
  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound);
  /// Uniform double in [0, 1).
  double uniform();
  bool coin() { return (next_u64() >> 63) != 0; }

  /// Independent child stream keyed by (this seed, label, index).
  Rng split(std::string_view label, std::uint64_t index = 0) const;

 private:
  std::uint64_t seed_;
  std::uint64_t s_[4];
};

std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace polyham

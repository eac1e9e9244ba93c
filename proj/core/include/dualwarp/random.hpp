#pragma once

#include <cstdint>
#include <random>

namespace dualwarp {

/// Portable random stream.
///
/// Bits come from std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The conversions below are spelled out instead of using
/// std::uniform_*_distribution (implementation-defined) so that other
/// languages can reproduce the exact stream:
///   uniform01   = (next() >> 11) * 2^-53
///   uniform(a,b) = a + (b - a) * uniform01
///   uniform_int(lo,hi) = lo + floor(uniform01 * (hi - lo + 1))
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform01();
  double uniform(double lo, double hi);
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

 private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finaliser.
std::uint64_t mix64(std::uint64_t x);

/// Child seed for stream `index` of `seed`: mix64(seed ^ mix64(index)).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace dualwarp

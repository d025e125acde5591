#pragma once

#include <cstdint>
#include <span>

#include "types.hpp"

namespace pdk {

/// Deterministic xoshiro256++ stream seeded through splitmix64. Streams are
/// derived from (seed, stream) and optionally a coordinate key, so draws
/// keyed by group elements are independent of traversal order and worker
/// count. Uniforms and normals are generated from raw 64-bit words rather
/// than std::uniform_real_distribution, which is not portable bit-for-bit.
class Rng {
public:
  Rng(std::uint64_t seed, std::uint64_t stream);

  /// Stream keyed by integer coordinates (one draw per tile center etc).
  static Rng keyed(const SeedRecord& seed, std::span<const std::int64_t> key);

  std::uint64_t next_u64();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform01();
  /// Standard normal (Box-Muller; caches the second variate).
  double normal();
  /// Index drawn from unnormalized nonnegative weights by CDF inversion.
  std::size_t categorical(std::span<const double> weights);

private:
  std::uint64_t s_[4];
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace pdk

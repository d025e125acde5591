#include "rng.hpp"

#include <cmath>

namespace pdk {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {
inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}
}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t sm = seed;
  (void)splitmix64(sm);
  sm ^= 0xA0761D6478BD642FULL * (stream + 1);
  for (auto& w : s_) w = splitmix64(sm);
}

Rng Rng::keyed(const SeedRecord& seed, std::span<const std::int64_t> key) {
  std::uint64_t sm = seed.seed;
  (void)splitmix64(sm);
  sm ^= 0xA0761D6478BD642FULL * (seed.stream + 1);
  (void)splitmix64(sm);
  for (std::int64_t k : key) {
    sm ^= splitmix64(sm) + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(k);
    (void)splitmix64(sm);
  }
  Rng r(0, 0);
  for (auto& w : r.s_) w = splitmix64(sm);
  r.has_cached_ = false;
  return r;
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_normal_;
  }
  // Box-Muller; u is kept away from 0 so log stays finite.
  double u = 0.0;
  do {
    u = uniform01();
  } while (u <= 0.0);
  const double v = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u));
  cached_normal_ = r * std::sin(kTwoPi * v);
  has_cached_ = true;
  return r * std::cos(kTwoPi * v);
}

std::size_t Rng::categorical(std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  double u = uniform01() * total;
  for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
    if (u < weights[i]) return i;
    u -= weights[i];
  }
  return weights.empty() ? 0 : weights.size() - 1;
}

}  // namespace pdk

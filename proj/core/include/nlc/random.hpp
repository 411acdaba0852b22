#pragma once

#include <cstdint>
#include <random>

namespace nlc {

/// SplitMix64 mixing step. Used to derive independent sub-stream seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seeded 64-bit generator.
///
/// All stochastic operations take one of these explicitly; identical seeds
/// give bit-identical streams on every platform (mt19937_64 is fully
/// specified by the standard and the uniform mapping below avoids
/// distribution objects, whose output is implementation defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double canonical() { return static_cast<double>(next_u64() >> 11) * 0x1p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * canonical(); }

  bool bernoulli(double p) { return canonical() < p; }

  /// Independent generator for a derived stream; deterministic in
  /// (seed, stream) and independent of how much of this stream was consumed.
  Rng derive(std::uint64_t stream) const {
    return Rng(splitmix64(seed_ ^ splitmix64(stream)));
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace nlc

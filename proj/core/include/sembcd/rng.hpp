#pragma once

#include <cstdint>
#include <random>

namespace sembcd {

/// Seeded random source with splittable substreams: stream(k) yields a
/// generator that is statistically independent of the parent and of other
/// streams, and depends only on (seed, k). Replications indexed by stream
/// therefore reproduce exactly regardless of scheduling.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(mix(seed ^ 0x6a09e667f3bcc909ull)) {}

  Rng stream(std::uint64_t index) const {
    return Rng(mix(seed_ + 0x9e3779b97f4a7c15ull * (index + 1)));
  }

  std::uint64_t seed() const { return seed_; }
  std::mt19937_64& engine() { return engine_; }

  /// Uniform on [0, 1).
  double uniform() {
    return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
  }

  /// Uniform integer in [0, bound).
  std::uint64_t uniform_index(std::uint64_t bound) {
    return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(engine_);
  }

  double normal() { return normal_(engine_); }

  /// Chi-squared with one degree of freedom, drawn as a squared standard normal.
  double chi2_1() {
    const double z = normal();
    return z * z;
  }

 private:
  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

}  // namespace sembcd

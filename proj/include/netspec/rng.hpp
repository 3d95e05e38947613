#pragma once

#include <cstdint>
#include <random>

namespace netspec {

/// Seeded generator with platform-independent draws. std::mt19937_64 is
/// fully specified by the standard; the distributions are not, so the
/// uniform mapping is done here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double canonical() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * canonical(); }

  bool bernoulli(double p) { return canonical() < p; }

  /// Uniform integer in [lo, hi] by rejection (no modulo bias).
  std::uint64_t integer(std::uint64_t lo, std::uint64_t hi);

 private:
  std::mt19937_64 engine_;
};

/// Independent seed for sub-stream `stream` of `seed` (splitmix64 mixing).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace netspec

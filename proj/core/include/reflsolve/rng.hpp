#pragma once

#include <cstdint>
#include <optional>
#include <random>

#include "reflsolve/linalg.hpp"

namespace reflsolve {

/// Seedable pseudo-random stream. Same seed, same sequence.
///
/// Built on std::mt19937_64, whose output sequence is fixed by the standard, so
/// uniforms (53-bit mantissa from the top bits) and Box–Muller normals are
/// reproducible across toolchains.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  /// Independent child stream for unit `index` (trial, matrix, ...) of a run
  /// seeded with `master`. Depends only on (master, index).
  static RngStream derive(std::uint64_t master, std::uint64_t index);

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform in [0, 1).
  double uniform();
  /// Standard normal via Box–Muller; the second variate of each pair is cached.
  double normal();

  Vector normal_vector(std::size_t n);
  /// Uniformly distributed direction on the unit sphere in R^n.
  Vector unit_vector(std::size_t n);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::optional<double> spare_normal_;
};

/// splitmix64 finalizer; used for seed derivation.
std::uint64_t mix_seed(std::uint64_t x) noexcept;

}  // namespace reflsolve

#pragma once

#include <array>
#include <cstdint>

namespace robustmom {

/// Seeded, stream-addressable random generator (xoshiro256++ core).
///
/// The pair (seed, stream_id) fully determines the output sequence, so two
/// streams with distinct ids are usable concurrently and a rerun with the
/// same pair reproduces the exact same doubles on any platform. All draws
/// (uniform, normal, gamma, ...) are implemented on top of next_u64() so the
/// contract does not depend on libstdc++ distribution internals.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  /// Child stream statistically independent of this one; pure (does not
  /// advance this stream). Same (seed, stream_id, tag) -> same child.
  RngStream derive(std::uint64_t tag) const;

  std::uint64_t next_u64();

  /// Uniform on [0, 1), 53-bit resolution.
  double uniform01();

  /// Uniform integer in [0, bound), bound >= 1.
  std::uint64_t uniform_below(std::uint64_t bound);

  /// Standard normal (polar Marsaglia; second value cached).
  double normal();

  /// Gamma(shape, scale=1), shape > 0 (Marsaglia-Tsang).
  double gamma(double shape);

  /// Chi-squared with df > 0 degrees of freedom (df need not be integral).
  double chi_squared(double df);

 private:
  std::uint64_t seed_ = 0;
  std::uint64_t stream_id_ = 0;
  std::array<std::uint64_t, 4> state_{};
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace robustmom

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

#include "jumpldp/errors.hpp"
#include "jumpldp/types.hpp"

namespace jumpldp::rng {

// Reserved sentinel; user-facing entry points reject it.
inline constexpr std::uint64_t kReservedSeed = ~std::uint64_t{0};

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

// SplitMix64 finalizer (Steele/Lea/Flood; Vigna's public-domain constants).
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based stream: state advances by a per-stream odd increment and the
/// output is the mixed counter, so a stream is a pure function of
/// (master_seed, sample_index, draw_index). Streams never share state.
struct Stream {
  std::uint64_t state = 0;
  std::uint64_t gamma = kGoldenGamma;

  std::uint64_t next_u64() {
    state += gamma;
    return mix64(state);
  }

  /// Uniform in (0, 1]; never returns 0 so -log(u) stays finite.
  double next_unit() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  /// Exponential with the given rate by inversion; rate 0 yields +infinity.
  double exponential(double rate) {
    const double u = next_unit();
    if (rate <= 0.0) return std::numeric_limits<double>::infinity();
    return -std::log(u) / rate;
  }

  /// Index drawn from a probability row by CDF walk. Rounding remainders go
  /// to the last state with positive mass.
  template <typename Row>
  int categorical(const Row& row) {
    const double u = next_unit();
    double acc = 0.0;
    int last_pos = -1;
    for (Eigen::Index i = 0; i < row.size(); ++i) {
      const double p = row[i];
      if (p <= 0.0) continue;
      last_pos = static_cast<int>(i);
      acc += p;
      if (u <= acc) return static_cast<int>(i);
    }
    if (last_pos < 0) throw UnreachableError("categorical: row has no positive mass");
    return last_pos;
  }
};

/// The stream driven by one seed. Both the start position and the increment
/// are mixed from the seed, so distinct seeds follow distinct orbits.
inline Stream stream_from_seed(std::uint64_t seed) {
  Stream s;
  s.state = mix64(seed ^ 0x5851f42d4c957f2dULL);
  s.gamma = mix64(seed + 0x14057b7ef767814fULL) | 1ULL;
  return s;
}

/// Per-sample seed of a batch, a pure function of (master_seed, sample_index).
inline std::uint64_t derive_sample_seed(std::uint64_t master_seed, std::uint64_t sample_index) {
  return mix64(master_seed + kGoldenGamma * (sample_index + 1));
}

inline void check_seed(std::uint64_t seed) {
  if (seed == kReservedSeed) throw SeedError("seed value is reserved");
}

}  // namespace jumpldp::rng

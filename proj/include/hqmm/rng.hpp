#pragma once

#include <cstdint>

namespace hqmm {

/// Identifies one independent random stream. Ensembles use
/// stream_index = machine index, which keeps parallel sampling reproducible
/// and schedule-independent.
struct RngSeed {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_index = 0;
};

/// Name recorded in experiment manifests so results stay auditable.
inline constexpr const char* kRngAlgorithm = "pcg32 (PCG-XSH-RR 64/32, O'Neill 2014)";

/// Minimal PCG32 generator. Each (seed, stream) pair selects an independent
/// sequence via the generator's odd increment.
class Pcg32 {
 public:
  Pcg32(std::uint64_t seed, std::uint64_t stream) : state_(0), inc_((stream << 1u) | 1u) {
    next_u32();
    state_ += seed;
    next_u32();
  }

  explicit Pcg32(RngSeed s) : Pcg32(s.master_seed, s.stream_index) {}

  std::uint32_t next_u32() {
    const std::uint64_t old = state_;
    state_ = old * 6364136223846793005ULL + inc_;
    const auto xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
    const auto rot = static_cast<std::uint32_t>(old >> 59u);
    return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_double() {
    const std::uint64_t hi = next_u32() >> 5;  // 27 bits
    const std::uint64_t lo = next_u32() >> 6;  // 26 bits
    return static_cast<double>((hi << 26) | lo) * (1.0 / 9007199254740992.0);
  }

  /// Uniform double on the open interval (0, 1); exact endpoints are
  /// redrawn.
  double next_open01() {
    double u = next_double();
    while (u <= 0.0) u = next_double();
    return u;
  }

 private:
  std::uint64_t state_;
  std::uint64_t inc_;
};

}  // namespace hqmm

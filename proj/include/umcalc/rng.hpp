#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <string_view>

namespace umcalc {

/// Philox4x32-10 block function. Exposed for known-answer tests.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Stable 64-bit stream id for a label (FNV-1a).
std::uint64_t stream_id(std::string_view label);

/// Stateless derivation of per-index sub-seeds for batch estimators; results
/// do not depend on how indices are split across workers.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/**
 * Counter-based generator. The keystream is a pure function of
 * (seed, stream label, draw index): the seed keys the block cipher and the
 * label selects the high half of the counter space, so streams with distinct
 * labels are non-overlapping by construction and every draw is reproducible
 * without simulating predecessors.
 */
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::string_view stream);

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1]; safe as a log argument.
  double uniform_positive() { return 1.0 - uniform(); }
  double exponential(double rate);
  bool bernoulli(double p) { return uniform() < p; }
  /// Exact for any mean: splits large means into independent halves, then
  /// uses the product method.
  std::uint64_t poisson(double mean);
  /// Index proportional to the given nonnegative weights.
  std::size_t categorical(std::span<const double> weights);

  // UniformRandomBitGenerator interface.
  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return next_u64(); }

 private:
  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 2> stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  unsigned buffered_ = 0;
};

}  // namespace umcalc

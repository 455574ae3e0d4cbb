#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "umcalc/dendrogram.hpp"
#include "umcalc/height.hpp"

namespace umcalc {

/**
 * Concatenation at depth h: disjoint union of the parts with cross distances
 * exactly 2h; masses add. Commutative with null as neutral element. Every
 * part must have diameter <= 2h (domain error names the offending part).
 */
Dendrogram concat(Height h, std::span<const Dendrogram> parts);
Dendrogram concat(Height h, std::initializer_list<Dendrogram> parts);

/// Truncation at depth h >= 0: caps pairwise distances at 2h. Exactly
/// consistent across depths: truncate(h', truncate(h, d)) equals
/// truncate(min(h, h'), d).
Dendrogram truncate(Height h, const Dendrogram& d);

/**
 * Prime factorization at depth h > 0: the maximal components of open
 * 2h-balls (all internal distances < 2h, strictly). Inputs of diameter
 * greater than 2h are truncated first and the fact is recorded.
 */
struct ForestDecomposition {
  Height depth;
  bool input_truncated = false;
  /// Encoding of the forest that was factored (the truncated input).
  CanonicalEncoding source;
  /// Canonical primes sorted by encoding bytes; empty for the null space.
  std::vector<Dendrogram> primes;
};
ForestDecomposition decompose(Height h, const Dendrogram& d);

/// Number of open 2h-balls of the support. Finite inputs always yield a
/// finite count; the flag exists for interface parity with non-atomic
/// carriers.
struct BallCount {
  std::uint64_t value = 0;
  bool infinite = false;
};
BallCount count_balls(Height h, const Dendrogram& d);

/**
 * Trunk at depth h > 0: one atom per prime carrying the prime's mass, at
 * distances (original cross-ball distance) - 2h. Marks do not survive the
 * aggregation. h >= diameter/2 yields a single atom.
 */
Dendrogram trunk(Height h, const Dendrogram& d);

/// Multiset embedding of the primes of truncate(h, u) into those of
/// truncate(h, v), compared by canonical encoding.
bool is_subforest(Height h, const Dendrogram& u, const Dendrogram& v);

/**
 * Factorization summaries for every depth at once. The decomposition is
 * constant on depth intervals between breakpoints (half the distinct
 * positive node heights); the value at a breakpoint is the limit from the
 * left (the finer factorization). Interval i covers
 * (breakpoints[i-1], breakpoints[i]], the last one is unbounded.
 */
struct TopsSummary {
  std::uint64_t ball_count = 0;
  /// Prime masses, sorted descending.
  std::vector<double> masses;
  /// Prime encodings, sorted.
  std::vector<std::string> primes;
};
struct TopsPath {
  std::vector<Height> breakpoints;
  /// summaries.size() == breakpoints.size() + 1; summaries[0] is the
  /// small-depth limit (individual atoms), the last entry the whole space.
  std::vector<TopsSummary> summaries;

  std::size_t interval_count() const { return summaries.size(); }
  /// Bounds of interval i; the upper bound of the last interval is absent.
  Height interval_low(std::size_t i) const;
  std::optional<Height> interval_high(std::size_t i) const;
};
TopsPath tops_path(const Dendrogram& d);

/// Projection of tops_path to the sorted prime-mass vectors.
struct MassFragmentationStep {
  Height h_low;
  std::optional<Height> h_high;
  std::vector<double> masses;
};
std::vector<MassFragmentationStep> mass_fragmentation_path(const Dendrogram& d);

/// Modulus of mass distribution: total mass of atoms whose open 2h-ball
/// carries mass strictly below delta. Additive under concatenation at any
/// depth h' > h.
double modulus_mass(double delta, Height h, const Dendrogram& d);

}  // namespace umcalc

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "umcalc/dendrogram.hpp"
#include "umcalc/height.hpp"

namespace umcalc {

/**
 * Symmetric matrix of pairwise distances with zero diagonal, stored as the
 * strict upper triangle in row-major order. Serves both as the distance
 * matrix of a space's support and as the matrix of a sampled atom tuple
 * (entries repeat when atoms do).
 */
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t order) : order_(order), upper_(pair_count(order)) {}

  static constexpr std::size_t pair_count(std::size_t order) {
    return order < 2 ? 0 : order * (order - 1) / 2;
  }

  std::size_t order() const { return order_; }

  Height at(std::size_t i, std::size_t j) const {
    if (i == j) {
      return Height();
    }
    return upper_[index(i, j)];
  }
  void set(std::size_t i, std::size_t j, Height h) { upper_[index(i, j)] = h; }

  /// Distance as a real number; r(i, i) = 0.
  double r(std::size_t i, std::size_t j) const { return at(i, j).value(); }

  Height max_entry() const;
  Height min_off_diagonal() const;
  bool all_entries_below(Height bound) const;

  /// Ultrametricity: every triple's two largest entries are equal, within
  /// eps_units on the quantized values.
  bool is_ultrametric(std::int64_t eps_units = 0) const;

  /// Entry substitution used by resampling operators: index l is replaced by
  /// a copy of index k, so row/column l copies row/column k.
  DistanceMatrix resample(std::size_t k, std::size_t l) const;

  /// Deterministic aggregation key over the quantized entries.
  std::string key() const;

  /// Largest absolute entry difference against a matrix of the same order.
  double max_norm_distance(const DistanceMatrix& o) const;

  friend bool operator==(const DistanceMatrix&, const DistanceMatrix&) = default;

 private:
  std::size_t index(std::size_t i, std::size_t j) const {
    if (i > j) {
      std::swap(i, j);
    }
    return i * (2 * order_ - i - 1) / 2 + (j - i - 1);
  }

  std::size_t order_ = 0;
  std::vector<Height> upper_;
};

/// Support of a space: atoms in canonical order with exact pairwise
/// distances.
struct SupportData {
  std::vector<double> masses;
  std::vector<std::optional<Mark>> marks;
  DistanceMatrix distances;

  std::size_t size() const { return masses.size(); }
  double total_mass() const;
};

/// Atoms and distances of the canonical form, in canonical atom order.
SupportData to_distance_matrix(const Dendrogram& d);

/**
 * Space with the given support. Rejects matrices that are not ultrametric
 * within eps_units (quantized), asymmetric input being excluded by the
 * storage format. Atoms with zero mass vanish; atoms at distance zero merge
 * unless their marks differ.
 */
Dendrogram from_distance_matrix(const DistanceMatrix& distances, std::span<const double> masses,
                                std::span<const std::optional<Mark>> marks = {},
                                std::int64_t eps_units = 0);

}  // namespace umcalc

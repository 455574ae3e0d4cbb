#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "umcalc/budget.hpp"
#include "umcalc/distance_matrix.hpp"

namespace umcalc::detail {

/// Number of ordered tuples n^m, or throws BudgetError beyond the budget.
std::uint64_t checked_tuple_count(std::size_t n, std::size_t order, std::uint64_t budget);

/**
 * Visits every ordered atom tuple (with repetition) of the support:
 * visit(tuple_matrix, mass_weight, indices). Zero-mass atoms still
 * enumerate (weight 0); callers on canonical supports never see them.
 */
template <class Visit>
void for_each_tuple(const SupportData& support, std::size_t order, std::uint64_t budget,
                    Visit&& visit) {
  const std::size_t n = support.size();
  if (order == 0) {
    return;
  }
  checked_tuple_count(n, order, budget);
  if (n == 0) {
    return;
  }
  std::vector<std::size_t> idx(order, 0);
  DistanceMatrix tuple(order);
  while (true) {
    double weight = 1.0;
    for (std::size_t p = 0; p < order; ++p) {
      weight *= support.masses[idx[p]];
    }
    for (std::size_t p = 0; p < order; ++p) {
      for (std::size_t q = p + 1; q < order; ++q) {
        tuple.set(p, q, idx[p] == idx[q] ? Height() : support.distances.at(idx[p], idx[q]));
      }
    }
    visit(static_cast<const DistanceMatrix&>(tuple), weight,
          std::span<const std::size_t>(idx.data(), idx.size()));
    std::size_t pos = order;
    while (pos > 0) {
      --pos;
      if (++idx[pos] < n) {
        break;
      }
      idx[pos] = 0;
      if (pos == 0) {
        return;
      }
    }
  }
}

/// Compensated accumulator (Kahan-Babuska) for long exact-ish sums.
class KahanSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

}  // namespace umcalc::detail

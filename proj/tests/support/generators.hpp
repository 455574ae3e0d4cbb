// Seeded corpus generators and independent brute-force oracles shared by the
// unit tests. The oracles go through the flat support representation
// (masses + distance matrix) rather than the tree recursions they check.
#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "umcalc/dendrogram.hpp"
#include "umcalc/distance_matrix.hpp"
#include "umcalc/height.hpp"
#include "umcalc/polynomials.hpp"
#include "umcalc/rng.hpp"

namespace umcalc::testing {

/// Masses in eighths of a unit: sums and products stay exactly representable.
inline double dyadic_mass(CounterRng& rng) {
  return static_cast<double>(1 + rng.next_u64() % 8) / 8.0;
}

/// Random canonical space: dyadic masses, node heights on the 1/64 grid,
/// built by repeatedly merging 2-4 pieces at strictly increasing heights.
inline Dendrogram random_tree(CounterRng& rng, std::size_t max_atoms) {
  const std::size_t n = 1 + static_cast<std::size_t>(rng.next_u64() % max_atoms);
  std::vector<Dendrogram> items;
  items.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    items.push_back(Dendrogram::leaf(dyadic_mass(rng)));
  }
  std::int64_t level = 0;
  while (items.size() > 1) {
    level += static_cast<std::int64_t>(1 + rng.next_u64() % 8);
    std::size_t k = 2 + static_cast<std::size_t>(rng.next_u64() % 3);
    k = std::min(k, items.size());
    std::vector<Dendrogram> group;
    group.reserve(k);
    for (std::size_t j = 0; j < k; ++j) {
      const std::size_t pick = static_cast<std::size_t>(rng.next_u64() % items.size());
      group.push_back(items[pick]);
      items[pick] = items.back();
      items.pop_back();
    }
    items.push_back(Dendrogram::node(Height::of(static_cast<double>(level) / 64.0),
                                     std::move(group)));
  }
  return canonicalize(items.front());
}

inline Dendrogram random_marked_tree(CounterRng& rng, std::size_t max_atoms,
                                     std::span<const Mark> marks) {
  const std::size_t n = 1 + static_cast<std::size_t>(rng.next_u64() % max_atoms);
  std::vector<Dendrogram> items;
  items.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    items.push_back(Dendrogram::leaf(dyadic_mass(rng), marks[rng.next_u64() % marks.size()]));
  }
  std::int64_t level = 0;
  while (items.size() > 1) {
    level += static_cast<std::int64_t>(1 + rng.next_u64() % 8);
    std::size_t k = 2 + static_cast<std::size_t>(rng.next_u64() % 3);
    k = std::min(k, items.size());
    std::vector<Dendrogram> group;
    group.reserve(k);
    for (std::size_t j = 0; j < k; ++j) {
      const std::size_t pick = static_cast<std::size_t>(rng.next_u64() % items.size());
      group.push_back(items[pick]);
      items[pick] = items.back();
      items.pop_back();
    }
    items.push_back(Dendrogram::node(Height::of(static_cast<double>(level) / 64.0),
                                     std::move(group)));
  }
  return canonicalize(items.front());
}

/// Number of open 2h-balls by union-find over the support.
inline std::uint64_t brute_ball_count(Height h, const Dendrogram& d) {
  const SupportData support = to_distance_matrix(d);
  const std::size_t n = support.size();
  if (n == 0) {
    return 0;
  }
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  const auto find = [&parent](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (support.distances.at(i, j) < h.doubled()) {
        parent[find(i)] = find(j);
      }
    }
  }
  std::uint64_t roots = 0;
  for (std::size_t i = 0; i < n; ++i) {
    roots += find(i) == i ? 1 : 0;
  }
  return roots;
}

/// Truncation through the support route: cap every entry at 2h and rebuild.
inline Dendrogram brute_truncate(Height h, const Dendrogram& d) {
  SupportData support = to_distance_matrix(d);
  const std::size_t n = support.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      support.distances.set(i, j, support.distances.at(i, j).min(h.doubled()));
    }
  }
  return from_distance_matrix(support.distances, support.masses, support.marks);
}

/// Monomial evaluation by plain odometer enumeration over the support, with
/// long double accumulation; optional strict truncation.
inline double brute_monomial(const MonomialSpec& spec, const Dendrogram& d) {
  const SupportData support = to_distance_matrix(d);
  const std::size_t n = support.size();
  const std::size_t m = spec.order;
  if (n == 0) {
    return 0.0;
  }
  std::vector<std::size_t> idx(m, 0);
  long double total = 0.0L;
  while (true) {
    DistanceMatrix matrix(m);
    bool keep = true;
    for (std::size_t a = 0; a < m && keep; ++a) {
      for (std::size_t b = a + 1; b < m; ++b) {
        const Height r = support.distances.at(idx[a], idx[b]);
        if (spec.depth && !(r < spec.depth->doubled())) {
          keep = false;
          break;
        }
        matrix.set(a, b, r);
      }
    }
    if (keep) {
      long double weight = 1.0L;
      for (std::size_t a = 0; a < m; ++a) {
        weight *= support.masses[idx[a]];
      }
      total += weight * static_cast<long double>(spec.phi(matrix));
    }
    std::size_t cursor = 0;
    while (cursor < m && ++idx[cursor] == n) {
      idx[cursor] = 0;
      ++cursor;
    }
    if (cursor == m) {
      break;
    }
  }
  return static_cast<double>(total);
}

/// Least transport cost over assignments for unit supplies/demands of equal
/// count (n <= 8), by exhaustive permutation search.
inline double brute_assignment_cost(
    std::size_t n, const std::function<double(std::size_t, std::size_t)>& cost) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      total += cost(i, perm[i]);
    }
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace umcalc::testing

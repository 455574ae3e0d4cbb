#include "umcalc/distance_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <stdexcept>

namespace umcalc {

Height DistanceMatrix::max_entry() const {
  Height m;
  for (Height h : upper_) {
    m = m.max(h);
  }
  return m;
}

Height DistanceMatrix::min_off_diagonal() const {
  if (upper_.empty()) {
    return Height();
  }
  Height m = upper_.front();
  for (Height h : upper_) {
    m = m.min(h);
  }
  return m;
}

bool DistanceMatrix::all_entries_below(Height bound) const {
  return std::all_of(upper_.begin(), upper_.end(), [&](Height h) { return h < bound; });
}

bool DistanceMatrix::is_ultrametric(std::int64_t eps_units) const {
  for (std::size_t i = 0; i < order_; ++i) {
    for (std::size_t j = i + 1; j < order_; ++j) {
      for (std::size_t k = j + 1; k < order_; ++k) {
        std::int64_t a = at(i, j).units();
        std::int64_t b = at(i, k).units();
        std::int64_t c = at(j, k).units();
        if (a < b) std::swap(a, b);
        if (a < c) std::swap(a, c);
        // a is the largest; the second largest must match it.
        if (a - std::max(b, c) > eps_units) {
          return false;
        }
      }
    }
  }
  return true;
}

DistanceMatrix DistanceMatrix::resample(std::size_t k, std::size_t l) const {
  DistanceMatrix out(order_);
  auto sub = [&](std::size_t x) { return x == l ? k : x; };
  for (std::size_t i = 0; i < order_; ++i) {
    for (std::size_t j = i + 1; j < order_; ++j) {
      const std::size_t a = sub(i);
      const std::size_t b = sub(j);
      out.set(i, j, a == b ? Height() : at(a, b));
    }
  }
  return out;
}

std::string DistanceMatrix::key() const {
  std::string out = "[" + std::to_string(order_);
  for (Height h : upper_) {
    out += ";";
    out += std::to_string(h.units());
  }
  out += "]";
  return out;
}

double DistanceMatrix::max_norm_distance(const DistanceMatrix& o) const {
  if (o.order_ != order_) {
    throw std::invalid_argument("matrix orders differ");
  }
  std::int64_t worst = 0;
  for (std::size_t p = 0; p < upper_.size(); ++p) {
    worst = std::max(worst, std::abs(upper_[p].units() - o.upper_[p].units()));
  }
  return static_cast<double>(worst) / Height::kScale;
}

double SupportData::total_mass() const {
  return std::accumulate(masses.begin(), masses.end(), 0.0);
}

namespace {

void fill_support(const Dendrogram& d, SupportData* out, std::size_t* next) {
  if (d.is_leaf()) {
    out->masses[*next] = d.leaf_mass();
    out->marks[*next] = d.leaf_mark();
    ++*next;
    return;
  }
  const std::size_t begin = *next;
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  for (const Dendrogram& c : d.children()) {
    const std::size_t lo = *next;
    fill_support(c, out, next);
    ranges.emplace_back(lo, *next);
  }
  // Atoms in different children first meet at this node's height.
  for (std::size_t a = 0; a < ranges.size(); ++a) {
    for (std::size_t b = a + 1; b < ranges.size(); ++b) {
      for (std::size_t i = ranges[a].first; i < ranges[a].second; ++i) {
        for (std::size_t j = ranges[b].first; j < ranges[b].second; ++j) {
          out->distances.set(i, j, d.root_height());
        }
      }
    }
  }
  (void)begin;
}

}  // namespace

SupportData to_distance_matrix(const Dendrogram& d) {
  const Dendrogram canon = canonicalize(d);
  SupportData out;
  const std::size_t n = canon.atom_count();
  out.masses.resize(n);
  out.marks.resize(n);
  out.distances = DistanceMatrix(n);
  std::size_t next = 0;
  if (!canon.is_null()) {
    fill_support(canon, &out, &next);
  }
  return out;
}

Dendrogram from_distance_matrix(const DistanceMatrix& distances, std::span<const double> masses,
                                std::span<const std::optional<Mark>> marks,
                                std::int64_t eps_units) {
  const std::size_t n = masses.size();
  if (distances.order() != n) {
    throw std::invalid_argument("matrix order does not match mass count");
  }
  if (!marks.empty() && marks.size() != n) {
    throw std::invalid_argument("mark count does not match mass count");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (distances.at(i, j).is_negative()) {
        throw std::invalid_argument("negative distance");
      }
    }
  }
  if (!distances.is_ultrametric(eps_units)) {
    throw std::invalid_argument("matrix violates the ultrametric triple inequality");
  }

  // Single linkage over the distinct merge values; exact on ultrametric
  // input.
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };

  std::map<Height, std::vector<std::pair<std::size_t, std::size_t>>> by_value;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      by_value[distances.at(i, j)].push_back({i, j});
    }
  }

  std::vector<Dendrogram> cluster(n);
  for (std::size_t i = 0; i < n; ++i) {
    cluster[i] = Dendrogram::leaf(masses[i], marks.empty() ? std::nullopt : marks[i]);
  }

  for (const auto& [value, pairs] : by_value) {
    std::map<std::size_t, std::vector<Dendrogram>> pieces;
    for (const auto& [i, j] : pairs) {
      std::size_t ri = find(i);
      std::size_t rj = find(j);
      if (ri == rj) {
        continue;
      }
      std::vector<Dendrogram> merged;
      auto take = [&](std::size_t root) {
        auto it = pieces.find(root);
        if (it == pieces.end()) {
          merged.push_back(std::move(cluster[root]));
        } else {
          for (Dendrogram& p : it->second) {
            merged.push_back(std::move(p));
          }
          pieces.erase(it);
        }
      };
      take(ri);
      take(rj);
      parent[ri] = rj;
      pieces[find(rj)] = std::move(merged);
    }
    for (auto& [root, group] : pieces) {
      cluster[root] = Dendrogram::node(value, std::move(group));
    }
  }

  std::vector<Dendrogram> roots;
  std::vector<bool> seen(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = find(i);
    if (!seen[r]) {
      seen[r] = true;
      roots.push_back(std::move(cluster[r]));
    }
  }
  if (roots.empty()) {
    return Dendrogram::null();
  }
  if (roots.size() > 1) {
    throw std::logic_error("disconnected single-linkage result");
  }
  return canonicalize(std::move(roots.front()));
}

}  // namespace umcalc

#include "umcalc/marked.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>

#include "umcalc/detail/tuple_enum.hpp"

namespace umcalc {
namespace {

bool parse_lattice_point(const Mark& mark, std::size_t dimension,
                         std::vector<std::int64_t>* out) {
  out->clear();
  const char* p = mark.data();
  const char* end = mark.data() + mark.size();
  while (p < end) {
    std::int64_t value = 0;
    const auto [next, ec] = std::from_chars(p, end, value);
    if (ec != std::errc()) {
      return false;
    }
    out->push_back(value);
    p = next;
    if (p < end) {
      if (*p != ',') {
        return false;
      }
      ++p;
      if (p == end) {
        return false;
      }
    }
  }
  return out->size() == dimension;
}

void collect_marked_atoms(const Dendrogram& d, const MarkSpace& space) {
  for (const Dendrogram::Atom& atom : d.atoms()) {
    if (!atom.mark) {
      throw std::invalid_argument("marked space requires a mark on every atom");
    }
    if (!space.contains(*atom.mark)) {
      throw std::invalid_argument("mark '" + *atom.mark + "' lies outside the declared space");
    }
  }
}

}  // namespace

MarkSpace MarkSpace::alphabet(std::vector<Mark> symbols, Mark neutral) {
  if (symbols.empty()) {
    throw std::invalid_argument("alphabet must not be empty");
  }
  MarkSpace space;
  for (const Mark& symbol : symbols) {
    if (!mark_token_ok(symbol)) {
      throw std::invalid_argument("invalid mark token '" + symbol + "'");
    }
  }
  space.symbols_ = std::move(symbols);
  space.neutral_ = std::move(neutral);
  if (!space.contains(space.neutral_)) {
    throw std::invalid_argument("neutral mark must belong to the alphabet");
  }
  return space;
}

MarkSpace MarkSpace::lattice(std::vector<std::pair<std::int64_t, std::int64_t>> bounds) {
  if (bounds.empty()) {
    throw std::invalid_argument("lattice needs at least one dimension");
  }
  MarkSpace space;
  std::string neutral;
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    const auto [lo, hi] = bounds[i];
    if (lo > hi) {
      throw std::invalid_argument("lattice bounds must satisfy lo <= hi");
    }
    if (lo > 0 || hi < 0) {
      throw std::invalid_argument("lattice box must contain the neutral point 0");
    }
    neutral += (i == 0 ? "0" : ",0");
  }
  space.bounds_ = std::move(bounds);
  space.neutral_ = std::move(neutral);
  return space;
}

bool MarkSpace::contains(const Mark& mark) const {
  if (!mark_token_ok(mark)) {
    return false;
  }
  if (!bounds_.empty()) {
    std::vector<std::int64_t> point;
    if (!parse_lattice_point(mark, bounds_.size(), &point)) {
      return false;
    }
    for (std::size_t i = 0; i < bounds_.size(); ++i) {
      if (point[i] < bounds_[i].first || point[i] > bounds_[i].second) {
        return false;
      }
    }
    return true;
  }
  return std::find(symbols_.begin(), symbols_.end(), mark) != symbols_.end();
}

std::uint64_t MarkSpace::cardinality() const {
  if (bounds_.empty()) {
    return symbols_.size();
  }
  std::uint64_t count = 1;
  for (const auto& [lo, hi] : bounds_) {
    count *= static_cast<std::uint64_t>(hi - lo + 1);
  }
  return count;
}

MarkedDendrogram marked_make(MarkSpace space, Dendrogram tree) {
  Dendrogram canon = canonicalize(tree);
  collect_marked_atoms(canon, space);
  return MarkedDendrogram{std::move(space), std::move(canon)};
}

MarkedDendrogram marked_concat(Height h, std::span<const MarkedDendrogram> parts) {
  if (parts.empty()) {
    throw std::invalid_argument("marked_concat needs at least one part for the mark space");
  }
  std::vector<Dendrogram> trees;
  trees.reserve(parts.size());
  for (const MarkedDendrogram& part : parts) {
    if (!(part.space == parts.front().space)) {
      throw std::invalid_argument("marked_concat parts must share the mark space");
    }
    trees.push_back(part.tree);
  }
  return MarkedDendrogram{parts.front().space, concat(h, trees)};
}

MarkedDendrogram marked_truncate(Height h, const MarkedDendrogram& d) {
  return MarkedDendrogram{d.space, truncate(h, d.tree)};
}

MarkedDecomposition marked_decompose(Height h, const MarkedDendrogram& d) {
  const ForestDecomposition base = decompose(h, d.tree);
  MarkedDecomposition out;
  out.depth = base.depth;
  out.input_truncated = base.input_truncated;
  out.primes.reserve(base.primes.size());
  for (const Dendrogram& prime : base.primes) {
    out.primes.push_back(MarkedDendrogram{d.space, prime});
  }
  return out;
}

double marked_monomial_eval(const MonomialSpec& spec, const MarkFunction& g,
                            const MarkedDendrogram& d, std::uint64_t budget) {
  if (spec.order == 0 || !spec.phi) {
    throw std::invalid_argument("marked monomial needs an order and a test function");
  }
  if (!g) {
    throw std::invalid_argument("marked monomial needs a mark function");
  }
  collect_marked_atoms(d.tree, d.space);
  const SupportData support = to_distance_matrix(d.tree);
  const Height two_h = spec.depth ? spec.depth->doubled() : Height();
  std::vector<Mark> marks(spec.order);
  detail::KahanSum sum;
  detail::for_each_tuple(
      support, spec.order, budget,
      [&](const DistanceMatrix& tuple, double weight, std::span<const std::size_t> idx) {
        if (weight == 0) {
          return;
        }
        if (spec.depth && !tuple.all_entries_below(two_h)) {
          return;
        }
        for (std::size_t p = 0; p < idx.size(); ++p) {
          marks[p] = *support.marks[idx[p]];
        }
        sum.add(weight * spec.phi(tuple) * g(marks));
      });
  return sum.value();
}

Dendrogram project_to_unmarked(const MarkedDendrogram& d) {
  struct Strip {
    static Dendrogram run(const Dendrogram& d) {
      if (d.is_null()) {
        return d;
      }
      if (d.is_leaf()) {
        return Dendrogram::leaf(d.leaf_mass());
      }
      std::vector<Dendrogram> kids;
      kids.reserve(d.children().size());
      for (const Dendrogram& c : d.children()) {
        kids.push_back(run(c));
      }
      return Dendrogram::node(d.root_height(), std::move(kids));
    }
  };
  return canonicalize(Strip::run(d.tree));
}

std::map<Mark, double> project_to_mark_measure(const MarkedDendrogram& d) {
  collect_marked_atoms(d.tree, d.space);
  std::map<Mark, double> out;
  for (const Dendrogram::Atom& atom : d.tree.atoms()) {
    out[*atom.mark] += atom.mass;
  }
  return out;
}

}  // namespace umcalc

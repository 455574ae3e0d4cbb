#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "umcalc/budget.hpp"
#include "umcalc/dendrogram.hpp"
#include "umcalc/height.hpp"
#include "umcalc/polynomials.hpp"
#include "umcalc/semigroup.hpp"

namespace umcalc {

/**
 * Finite mark alphabet or bounded integer lattice box with a designated
 * neutral mark. Lattice marks are comma-separated integer tokens ("1,-2").
 */
class MarkSpace {
 public:
  static MarkSpace alphabet(std::vector<Mark> symbols, Mark neutral);
  static MarkSpace lattice(std::vector<std::pair<std::int64_t, std::int64_t>> bounds);

  bool contains(const Mark& mark) const;
  const Mark& neutral() const { return neutral_; }
  std::uint64_t cardinality() const;
  bool is_lattice() const { return !bounds_.empty(); }
  const std::vector<Mark>& symbols() const { return symbols_; }
  const std::vector<std::pair<std::int64_t, std::int64_t>>& bounds() const { return bounds_; }

  friend bool operator==(const MarkSpace&, const MarkSpace&) = default;

 private:
  MarkSpace() = default;
  std::vector<Mark> symbols_;  // alphabet form
  std::vector<std::pair<std::int64_t, std::int64_t>> bounds_;  // lattice form
  Mark neutral_;
};

/**
 * Marked space: every atom carries a mark from the space. Marks ride along
 * with the atoms and never influence ball membership; atoms at distance zero
 * with distinct marks stay distinct, so height-0 nodes with differently
 * marked leaves are part of the canonical form.
 */
struct MarkedDendrogram {
  MarkSpace space;
  Dendrogram tree;
};

/// Validates mark membership and canonicalizes. Throws on unmarked leaves or
/// marks outside the space.
MarkedDendrogram marked_make(MarkSpace space, Dendrogram tree);

/// Concatenation at depth h; parts must share the mark space.
MarkedDendrogram marked_concat(Height h, std::span<const MarkedDendrogram> parts);

/// Truncation acts on the genealogy only; marks are untouched.
MarkedDendrogram marked_truncate(Height h, const MarkedDendrogram& d);

struct MarkedDecomposition {
  Height depth;
  bool input_truncated = false;
  std::vector<MarkedDendrogram> primes;
};
/// Open-ball factorization; ball membership ignores marks.
MarkedDecomposition marked_decompose(Height h, const MarkedDendrogram& d);

/// Test function of the atom marks of a tuple.
using MarkFunction = std::function<double(std::span<const Mark>)>;

/// Monomial against the marked tuple law: distance test function times mark
/// test function, with the spec's truncation applied to distances only.
double marked_monomial_eval(const MonomialSpec& spec, const MarkFunction& g,
                            const MarkedDendrogram& d,
                            std::uint64_t budget = kDefaultTupleBudget);

/// Forgets marks; zero-distance atoms that differed only by mark merge.
Dendrogram project_to_unmarked(const MarkedDendrogram& d);

/// Pushforward of the measure to the mark space: mark -> total mass.
std::map<Mark, double> project_to_mark_measure(const MarkedDendrogram& d);

}  // namespace umcalc

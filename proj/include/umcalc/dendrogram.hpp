#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "umcalc/height.hpp"

namespace umcalc {

/// Atom label. Canonical token; lattice-valued marks use comma-separated
/// integers ("0,-2"). Tokens may not contain '(', ')', '|' or whitespace.
using Mark = std::string;

bool mark_token_ok(const Mark& mark);

/**
 * Ultrametric measure space with atomic measure, represented as a rooted
 * merge tree. Leaves carry masses (and optional marks); internal nodes carry
 * the merge height, which equals the pairwise distance between atoms that
 * first meet there. The default-constructed value is the null space (empty
 * tree, mass zero), the neutral element of every concatenation semigroup.
 *
 * Canonical form:
 *  - heights strictly decrease from parent to child (leaves sit at height 0),
 *    except that a height-0 internal node may hold leaves with pairwise
 *    distinct marks (atoms at distance zero that differ only by mark);
 *  - no unary internal node, no zero-mass leaf;
 *  - zero-distance leaves with equal mark (or both unmarked) are merged,
 *    masses added;
 *  - children are sorted by canonical encoding bytes, ties by total mass.
 *
 * Two spaces are isomorphic (equal as measure spaces up to support isometry,
 * marks fixed pointwise) iff their canonical encodings are equal.
 */
class Dendrogram {
 public:
  Dendrogram() = default;

  static Dendrogram null() { return Dendrogram(); }
  static Dendrogram leaf(double mass, std::optional<Mark> mark = std::nullopt);
  /// Internal node. Null children are dropped; no children yields null.
  static Dendrogram node(Height height, std::vector<Dendrogram> children);

  bool is_null() const { return kind_ == Kind::kNull; }
  bool is_leaf() const { return kind_ == Kind::kLeaf; }
  bool is_node() const { return kind_ == Kind::kNode; }

  /// Merge height of the root; 0 for leaves and the null space.
  Height root_height() const { return height_; }
  double leaf_mass() const { return mass_; }
  const std::optional<Mark>& leaf_mark() const { return mark_; }
  const std::vector<Dendrogram>& children() const { return children_; }

  double total_mass() const;
  std::size_t atom_count() const;
  /// Largest pairwise distance on the support (root height), 0 if fewer
  /// than two atoms.
  Height diameter() const;

  struct Atom {
    double mass = 0.0;
    std::optional<Mark> mark;
  };
  /// Leaves in stored order (canonical order once canonicalized).
  std::vector<Atom> atoms() const;

 private:
  enum class Kind : std::uint8_t { kNull, kLeaf, kNode };

  Kind kind_ = Kind::kNull;
  Height height_;
  double mass_ = 0.0;
  std::optional<Mark> mark_;
  std::vector<Dendrogram> children_;
};

struct ValidationIssue {
  enum class Severity { kError, kNonCanonical };
  Severity severity;
  std::string detail;
};

/// Outcome of structural validation. A well-formed tree has no errors; a
/// canonical tree additionally has no normal-form deviations.
struct ValidationReport {
  std::vector<ValidationIssue> issues;

  bool well_formed() const;
  bool canonical() const { return issues.empty(); }
  std::string to_string() const;
};

/// Reports increasing heights, negative or non-finite quantities and invalid
/// mark tokens as errors; unary nodes, zero-mass leaves, equal-height
/// nesting, unmerged zero-distance atoms and unsorted children as
/// normal-form deviations.
ValidationReport validate(const Dendrogram& d);

/// Normal form of a well-formed tree: collapses unary chains and equal-height
/// nesting, drops zero-mass leaves, merges zero-distance atoms with equal
/// mark, sorts children. Throws std::invalid_argument on malformed input.
Dendrogram canonicalize(const Dendrogram& d);

/// Canonical encoding: readable linearization of the canonical form plus a
/// stable 64-bit hash of those bytes. Equal bytes iff isomorphic.
struct CanonicalEncoding {
  std::string bytes;
  std::uint64_t hash = 0;

  friend bool operator==(const CanonicalEncoding&, const CanonicalEncoding&) = default;
};

/// Encoding of canonicalize(d).
CanonicalEncoding encode(const Dendrogram& d);

/// Isomorphy of measure spaces (marks fixed pointwise): equality of
/// canonical encodings.
bool is_isomorphic(const Dendrogram& a, const Dendrogram& b);

/// Dilation of the metric by a > 0; masses unchanged.
Dendrogram scale_metric(double a, const Dendrogram& d);

/// Scaling of the measure by a >= 0; metric unchanged. a = 0 yields null.
Dendrogram scale_mass(double a, const Dendrogram& d);

}  // namespace umcalc

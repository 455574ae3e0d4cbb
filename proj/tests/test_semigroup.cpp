#include <doctest.h>

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "support/generators.hpp"
#include "umcalc/dendrogram.hpp"
#include "umcalc/height.hpp"
#include "umcalc/rng.hpp"
#include "umcalc/semigroup.hpp"

using namespace umcalc;
using umcalc::testing::brute_ball_count;
using umcalc::testing::brute_truncate;
using umcalc::testing::random_tree;

namespace {

Dendrogram pair_space(double mass_a, double mass_b, double distance) {
  // Merge height equals the pairwise distance.
  return Dendrogram::node(Height::of(distance),
                          {Dendrogram::leaf(mass_a), Dendrogram::leaf(mass_b)});
}

}  // namespace

TEST_CASE("concat places parts at cross distance exactly 2h") {
  const Dendrogram joined =
      concat(Height::of(1.0), {Dendrogram::leaf(1.0), Dendrogram::leaf(2.0)});
  CHECK(joined.total_mass() == 3.0);
  CHECK(joined.diameter() == Height::of(2.0));

  // Null is neutral.
  CHECK(encode(concat(Height::of(1.0), {Dendrogram::leaf(1.0), Dendrogram::null()})) ==
        encode(Dendrogram::leaf(1.0)));
  CHECK(concat(Height::of(1.0), {Dendrogram::null(), Dendrogram::null()}).is_null());

  // Order does not matter.
  const Dendrogram a = pair_space(1.0, 1.0, 1.0);
  const Dendrogram b = Dendrogram::leaf(0.5);
  CHECK(encode(concat(Height::of(2.0), {a, b})) == encode(concat(Height::of(2.0), {b, a})));

  // Associativity at a fixed depth.
  const Dendrogram c = pair_space(2.0, 0.5, 2.0);
  const Dendrogram left = concat(Height::of(2.0), {concat(Height::of(2.0), {a, b}), c});
  const Dendrogram right = concat(Height::of(2.0), {a, concat(Height::of(2.0), {b, c})});
  CHECK(encode(left) == encode(right));

  // Parts wider than 2h are rejected.
  CHECK_THROWS_AS(concat(Height::of(0.25), {pair_space(1.0, 1.0, 1.0), b}),
                  std::invalid_argument);
}

TEST_CASE("truncate caps distances and is consistent across depths") {
  // Distance values {1, 3, 5} capped at 2h = 4 become {1, 3, 4}.
  const Dendrogram chain = Dendrogram::node(
      Height::of(5.0),
      {Dendrogram::node(Height::of(3.0),
                        {pair_space(1.0, 1.0, 1.0), Dendrogram::leaf(1.0)}),
       Dendrogram::leaf(1.0)});
  const Dendrogram cut = truncate(Height::of(2.0), chain);
  const SupportData support = to_distance_matrix(cut);
  std::vector<double> distances;
  for (std::size_t i = 0; i < support.size(); ++i) {
    for (std::size_t j = i + 1; j < support.size(); ++j) {
      distances.push_back(support.distances.r(i, j));
    }
  }
  std::sort(distances.begin(), distances.end());
  CHECK(distances == std::vector<double>{1.0, 3.0, 3.0, 4.0, 4.0, 4.0});

  // Identity when the input is already narrow enough.
  CHECK(encode(truncate(Height::of(3.0), chain)) == encode(chain));
  // Depth zero collapses everything to one atom.
  const Dendrogram point = truncate(Height(), chain);
  CHECK(point.is_leaf());
  CHECK(point.total_mass() == 4.0);

  CounterRng rng(7, "test.truncate");
  for (int i = 0; i < 100; ++i) {
    const Dendrogram d = random_tree(rng, 16);
    const double base = std::max(d.diameter().value(), 1.0);
    const Height low = Height::of(base * 0.25);
    const Height high = Height::of(base * 0.5);
    CHECK(encode(truncate(low, truncate(high, d))) == encode(truncate(low, d)));
    CHECK(encode(truncate(high, truncate(low, d))) == encode(truncate(low, d)));
    // Independent support-side oracle.
    CHECK(encode(truncate(low, d)) == encode(brute_truncate(low, d)));
  }
}

TEST_CASE("decompose splits into open-ball primes") {
  const Dendrogram three =
      concat(Height::of(1.0),
             {Dendrogram::leaf(1.0), Dendrogram::leaf(2.0), Dendrogram::leaf(3.0)});
  const ForestDecomposition dec = decompose(Height::of(1.0), three);
  CHECK(dec.primes.size() == 3);  // distance 2 is not strictly below 2h = 2
  CHECK_FALSE(dec.input_truncated);
  for (const Dendrogram& p : dec.primes) {
    CHECK(p.is_leaf());
  }
  CHECK(encode(concat(Height::of(1.0), dec.primes)) == encode(three));

  // Wider input gets truncated first and says so.
  const Dendrogram wide = pair_space(1.0, 1.0, 6.0);
  const ForestDecomposition wide_dec = decompose(Height::of(1.0), wide);
  CHECK(wide_dec.input_truncated);
  CHECK(wide_dec.primes.size() == 2);

  // Ball interiors stay together: distance 1 < 2h = 2.
  const Dendrogram mixed = concat(Height::of(1.0), {pair_space(1.0, 2.0, 1.0),
                                                    Dendrogram::leaf(0.5)});
  const ForestDecomposition mixed_dec = decompose(Height::of(1.0), mixed);
  REQUIRE(mixed_dec.primes.size() == 2);
  for (const Dendrogram& p : mixed_dec.primes) {
    CHECK(p.diameter() < Height::of(2.0));
  }

  CHECK(decompose(Height::of(1.0), Dendrogram::null()).primes.empty());
  CHECK_THROWS_AS(decompose(Height(), three), std::invalid_argument);
}

TEST_CASE("factorization round trip on a random corpus") {
  CounterRng rng(11, "test.decompose");
  for (int i = 0; i < 150; ++i) {
    const Dendrogram d = random_tree(rng, 24);
    const double base = std::max(d.diameter().value(), 1.0);
    for (const double frac : {0.25, 0.5, 0.75}) {
      const Height h = Height::of(base * frac);
      const ForestDecomposition dec = decompose(h, d);
      CHECK(encode(concat(h, dec.primes)) == encode(truncate(h, d)));
      CHECK(dec.primes.size() == brute_ball_count(h, d));
      CHECK(std::is_sorted(dec.primes.begin(), dec.primes.end(),
                           [](const Dendrogram& x, const Dendrogram& y) {
                             return encode(x).bytes < encode(y).bytes;
                           }));
    }
  }
}

TEST_CASE("ball counts match the union-find oracle") {
  CounterRng rng(13, "test.count");
  for (int i = 0; i < 100; ++i) {
    const Dendrogram d = random_tree(rng, 16);
    const double base = std::max(d.diameter().value(), 1.0);
    for (const double frac : {0.125, 0.375, 0.625, 1.0}) {
      const Height h = Height::of(base * frac);
      const BallCount count = count_balls(h, d);
      CHECK_FALSE(count.infinite);
      CHECK(count.value == brute_ball_count(h, d));
    }
  }
  CHECK(count_balls(Height::of(1.0), Dendrogram::null()).value == 0);
}

TEST_CASE("trunk collapses primes to atoms and lowers the heights") {
  // Two atoms at distance 3, masses 1 and 2; trunk at h = 1 has the same
  // masses at distance 1.
  const Dendrogram d = pair_space(1.0, 2.0, 3.0);
  const Dendrogram t = trunk(Height::of(1.0), d);
  CHECK(encode(t) == encode(pair_space(1.0, 2.0, 1.0)));

  // Past half the diameter everything is one atom.
  const Dendrogram point = trunk(Height::of(2.0), d);
  CHECK(point.is_leaf());
  CHECK(point.total_mass() == 3.0);

  // Trunk heights: distance d_ij between balls becomes d_ij - 2h. The pair
  // at distance exactly 2h splits into two balls whose trunk atoms land at
  // distance zero and merge.
  const Dendrogram nested = Dendrogram::node(
      Height::of(3.0), {pair_space(1.0, 1.0, 2.0), Dendrogram::leaf(1.0)});
  const Dendrogram nested_trunk = trunk(Height::of(1.0), nested);
  REQUIRE(nested_trunk.is_node());
  CHECK(nested_trunk.diameter() == Height::of(1.0));
  CHECK(nested_trunk.atom_count() == 2);
  std::vector<double> masses;
  for (const auto& atom : nested_trunk.atoms()) {
    masses.push_back(atom.mass);
  }
  std::sort(masses.begin(), masses.end());
  CHECK(masses == std::vector<double>{1.0, 2.0});
}

TEST_CASE("subforest order compares prime multisets") {
  const Dendrogram u = pair_space(1.0, 1.0, 1.0);
  const Dendrogram v = concat(Height::of(1.0), {u, Dendrogram::leaf(0.5)});
  CHECK(is_subforest(Height::of(1.0), u, v));
  CHECK_FALSE(is_subforest(Height::of(1.0), v, u));
  CHECK(is_subforest(Height::of(1.0), Dendrogram::null(), u));
  CHECK(is_subforest(Height::of(1.0), v, v));
}

TEST_CASE("fragmentation path walks the factorization through all depths") {
  // Masses (2, 1) at distance 3: two primes up to h = 1.5 inclusive, then one.
  const Dendrogram d = pair_space(2.0, 1.0, 3.0);
  const TopsPath path = tops_path(d);
  REQUIRE(path.breakpoints.size() == 1);
  CHECK(path.breakpoints[0] == Height::of(1.5));
  REQUIRE(path.summaries.size() == 2);
  CHECK(path.summaries[0].ball_count == 2);
  CHECK(path.summaries[0].masses == std::vector<double>{2.0, 1.0});
  CHECK(path.summaries[1].ball_count == 1);
  CHECK(path.summaries[1].masses == std::vector<double>{3.0});

  // Left continuity: at the breakpoint the finer factorization holds.
  CHECK(decompose(Height::of(1.5), d).primes.size() == 2);
  CHECK(decompose(Height::of(1.6), d).primes.size() == 1);

  const std::vector<MassFragmentationStep> steps = mass_fragmentation_path(d);
  REQUIRE(steps.size() == 2);
  CHECK(steps[0].h_low.is_zero());
  CHECK(steps[0].h_high == Height::of(1.5));
  CHECK(steps[0].masses == std::vector<double>{2.0, 1.0});
  CHECK_FALSE(steps[1].h_high.has_value());
  CHECK(steps[1].masses == std::vector<double>{3.0});

  // Singleton: a single unbounded interval.
  const TopsPath single = tops_path(Dendrogram::leaf(1.0));
  CHECK(single.breakpoints.empty());
  REQUIRE(single.summaries.size() == 1);
  CHECK(single.summaries[0].ball_count == 1);

  // Random corpus: the path agrees with point decompositions inside each
  // interval and at its right end.
  CounterRng rng(17, "test.tops");
  for (int i = 0; i < 60; ++i) {
    const Dendrogram space = random_tree(rng, 12);
    const TopsPath p = tops_path(space);
    for (std::size_t k = 0; k < p.interval_count(); ++k) {
      Height probe;
      if (const auto high = p.interval_high(k)) {
        probe = *high;  // breakpoints carry the left limit
      } else {
        probe = p.interval_low(k) + Height::of(1.0);
      }
      if (probe.is_zero()) {
        continue;
      }
      const ForestDecomposition dec = decompose(probe, space);
      CHECK(dec.primes.size() == p.summaries[k].ball_count);
      std::vector<double> masses;
      for (const Dendrogram& prime : dec.primes) {
        masses.push_back(prime.total_mass());
      }
      std::sort(masses.begin(), masses.end(), std::greater<>());
      CHECK(masses == p.summaries[k].masses);
    }
  }
}

TEST_CASE("modulus of mass sums light balls and adds over concatenation") {
  // Balls at h = 1: {0.5} and {1 + 1}.
  const Dendrogram d =
      concat(Height::of(1.0), {Dendrogram::leaf(0.5), pair_space(1.0, 1.0, 1.0)});
  CHECK(modulus_mass(1.0, Height::of(1.0), d) == 0.5);
  CHECK(modulus_mass(0.5, Height::of(1.0), d) == 0.0);   // strict threshold
  CHECK(modulus_mass(3.0, Height::of(1.0), d) == 2.5);

  CounterRng rng(23, "test.modulus");
  for (int i = 0; i < 60; ++i) {
    const Dendrogram u = random_tree(rng, 10);
    const Dendrogram v = random_tree(rng, 10);
    const double base = std::max({u.diameter().value(), v.diameter().value(), 1.0});
    const Height h = Height::of(base * 0.25);
    const Height join_at = Height::of(base);  // strictly above h
    const double delta = 1.25;
    const double joined = modulus_mass(delta, h, concat(join_at, {u, v}));
    CHECK(joined ==
          doctest::Approx(modulus_mass(delta, h, u) + modulus_mass(delta, h, v))
              .epsilon(1e-12));
  }
}

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include "support/generators.hpp"
#include "umcalc/budget.hpp"
#include "umcalc/dendrogram.hpp"
#include "umcalc/distance_matrix.hpp"
#include "umcalc/polynomials.hpp"
#include "umcalc/rng.hpp"
#include "umcalc/semigroup.hpp"

using namespace umcalc;
using umcalc::testing::brute_monomial;
using umcalc::testing::random_tree;

namespace {

Dendrogram pair_space(double mass_a, double mass_b, double distance) {
  // Merge height equals the pairwise distance.
  return Dendrogram::node(Height::of(distance),
                          {Dendrogram::leaf(mass_a), Dendrogram::leaf(mass_b)});
}

}  // namespace

TEST_CASE("tuple-law measures aggregate ordered tuples") {
  const Dendrogram d = pair_space(1.0, 2.0, 3.0);
  const DistanceMatrixMeasure m2 = distance_matrix_measure(2, d);
  CHECK(m2.order() == 2);
  CHECK(m2.total_weight() == 9.0);  // (total mass)^2
  REQUIRE(m2.support().size() == 2);
  // Diagonal tuples carry 1^2 + 2^2, the mixed ones 2 * 1 * 2.
  CHECK(m2.weight_all_entries_at_least(Height::of(3.0)) == 4.0);
  CHECK(m2.weight_all_entries_at_least(Height::of(3.5)) == 0.0);
  CHECK(m2.weight_all_entries_at_least(Height()) == 9.0);

  const DistanceMatrixMeasure m1 = distance_matrix_measure(1, d);
  CHECK(m1.total_weight() == 3.0);
  CHECK(m1.support().size() == 1);
  // Order below 2 has no entries, so every matrix passes the bound.
  CHECK(m1.weight_all_entries_at_least(Height::of(10.0)) == 3.0);

  CHECK(m2.scaled(0.5).total_weight() == 4.5);
  CHECK(distance_matrix_measure(2, Dendrogram::null()).total_weight() == 0.0);
}

TEST_CASE("pair-measure concatenation identity on a hand example") {
  const Dendrogram u = Dendrogram::leaf(1.0);
  const Dendrogram v = Dendrogram::leaf(2.0);
  const Height h = Height::of(1.0);
  const DistanceMatrixMeasure joined = distance_matrix_measure(2, concat(h, {u, v}));

  DistanceMatrixMeasure expected(2);
  DistanceMatrix zero(2);
  expected.add(zero, 1.0);   // u diagonal
  expected.add(zero, 4.0);   // v diagonal
  DistanceMatrix cross(2);
  cross.set(0, 1, h.doubled());
  expected.add(cross, 4.0);  // 2 * mass(u) * mass(v) at distance 2h
  CHECK(joined == expected);
}

TEST_CASE("monomial evaluation on hand examples") {
  const Dendrogram two = pair_space(1.0, 1.0, 3.0);
  const MonomialSpec r12 = basis_monomial("r12", 2);
  CHECK(eval_monomial(r12, two) == 6.0);  // both ordered mixed pairs see r = 3
  CHECK(eval_monomial(r12.with_depth(Height::of(1.0)), two) == 0.0);
  CHECK(eval_monomial(r12.with_depth(Height::of(1.5)), two) == 0.0);  // strict cut
  CHECK(eval_monomial(r12.with_depth(Height::of(1.5005)), two) == 6.0);

  const MonomialSpec one1 = basis_monomial("one", 1);
  const MonomialSpec one3 = basis_monomial("one", 3);
  CHECK(eval_monomial(one1, two) == 2.0);
  CHECK(eval_monomial(one3, two) == 8.0);
  CHECK(eval_monomial(one1, Dendrogram::null()) == 0.0);

  const MonomialSpec sumr = basis_monomial("sumr", 3);
  // Tuples: each unordered pair slot contributes; brute route cross-checks.
  CHECK(eval_monomial(sumr, two) == doctest::Approx(brute_monomial(sumr, two)));
}

TEST_CASE("monomial evaluation matches the odometer oracle on a corpus") {
  CounterRng rng(31, "test.poly.corpus");
  const std::vector<MonomialSpec> basis = probe_basis();
  for (int i = 0; i < 40; ++i) {
    const Dendrogram d = random_tree(rng, 7);
    const double base = std::max(d.diameter().value(), 1.0);
    for (const MonomialSpec& spec : basis) {
      const double plain = eval_monomial(spec, d);
      CHECK(plain == doctest::Approx(brute_monomial(spec, d)).epsilon(1e-12));
      const MonomialSpec cut = spec.with_depth(Height::of(base * 0.375));
      const double truncated = eval_monomial(cut, d);
      CHECK(truncated == doctest::Approx(brute_monomial(cut, d)).epsilon(1e-12));
    }
  }
}

TEST_CASE("monomials of the tuple law equal the measure-side integral") {
  CounterRng rng(37, "test.poly.measure");
  for (int i = 0; i < 25; ++i) {
    const Dendrogram d = random_tree(rng, 6);
    const MonomialSpec spec = basis_monomial("sumr", 2);
    const DistanceMatrixMeasure law = distance_matrix_measure(2, d);
    double integral = 0.0;
    for (const auto& [matrix, weight] : law.support()) {
      integral += weight * spec.phi(matrix);
    }
    CHECK(eval_monomial(spec, d) == doctest::Approx(integral).epsilon(1e-12));
  }
}

TEST_CASE("Monte Carlo evaluation agrees with the exact value") {
  CounterRng rng(41, "test.poly.mc");
  const Dendrogram d = random_tree(rng, 12);
  const MonomialSpec spec = basis_monomial("r12", 2);
  const double exact = eval_monomial(spec, d);
  const McEstimate est = eval_monomial_mc(spec, d, 40000, 1729);
  REQUIRE(est.samples == 40000);
  CHECK(std::abs(est.value - exact) <= 5.0 * std::max(est.std_error, 1e-12));
  // Deterministic in the seed.
  const McEstimate again = eval_monomial_mc(spec, d, 40000, 1729);
  CHECK(est.value == again.value);
}

TEST_CASE("truncated monomials are additive over concatenation") {
  CounterRng rng(43, "test.poly.homo");
  const std::vector<MonomialSpec> basis = probe_basis();
  for (int i = 0; i < 30; ++i) {
    const Dendrogram raw_u = random_tree(rng, 6);
    const Dendrogram raw_v = random_tree(rng, 6);
    const double base = std::max({raw_u.diameter().value(), raw_v.diameter().value(), 1.0});
    const Height h = Height::of(base * 0.5);
    const Dendrogram u = truncate(h, raw_u);
    const Dendrogram v = truncate(h, raw_v);
    const Dendrogram joined = concat(h, {u, v});
    for (const MonomialSpec& probe : basis) {
      const MonomialSpec spec = probe.with_depth(h);
      CHECK(eval_monomial(spec, joined) ==
            doctest::Approx(eval_monomial(spec, u) + eval_monomial(spec, v))
                .epsilon(1e-10));
    }
  }
}

TEST_CASE("power sums over the factorization take both routes to one value") {
  // Two unit atoms at distance 2h: primes are the atoms.
  const Dendrogram two = pair_space(1.0, 1.0, 2.0);
  MonomialSpec c34;
  c34.order = 1;
  c34.phi = [](const DistanceMatrix&) { return 0.75; };
  c34.name = "const-3/4";
  const MonomialSpec spec = c34.with_depth(Height::of(1.0));
  const PowerSumResult squared = power_sum_monomial(spec, 2, two);
  CHECK(squared.via_decomposition == 1.125);  // 2 * (3/4)^2
  CHECK(squared.via_lifted == 1.125);

  const MonomialSpec lifted = lift_power_sum(spec, 3);
  CHECK(lifted.order == 3);

  CounterRng rng(47, "test.poly.power");
  for (int i = 0; i < 25; ++i) {
    const Dendrogram d = random_tree(rng, 6);
    const double base = std::max(d.diameter().value(), 1.0);
    const MonomialSpec probe = c34.with_depth(Height::of(base * 0.375));
    for (std::size_t n = 1; n <= 3; ++n) {
      const PowerSumResult result = power_sum_monomial(probe, n, d);
      CHECK(result.via_decomposition ==
            doctest::Approx(result.via_lifted).epsilon(1e-12));
      if (n == 1) {
        CHECK(result.via_decomposition ==
              doctest::Approx(eval_monomial(probe, d)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("seeded Laplace estimates are exact for deterministic samplers") {
  const Dendrogram fixed = pair_space(0.5, 1.0, 1.0);
  PolynomialSpec spec;
  spec.terms.push_back(basis_monomial("r12", 2));
  const double phi = eval_polynomial(spec, fixed);
  const auto sampler = [&fixed](std::uint64_t) { return fixed; };
  const McEstimate est = laplace_estimate(sampler, spec, 500, 7, 4);
  CHECK(est.value == doctest::Approx(std::exp(-phi)).epsilon(1e-12));
  CHECK(est.std_error == doctest::Approx(0.0));
}

TEST_CASE("Laplace estimates are reproducible and worker-stable") {
  CounterRng rng(53, "test.poly.laplace");
  const Dendrogram a = random_tree(rng, 5);
  const Dendrogram b = random_tree(rng, 5);
  const auto sampler = [&](std::uint64_t seed) {
    return (seed % 2 == 0) ? a : b;  // deterministic in the derived seed
  };
  PolynomialSpec spec;
  spec.terms.push_back(basis_monomial("expnegsum", 2));
  // Bit-identical for a fixed (seed, workers) pair.
  const McEstimate once = laplace_estimate(sampler, spec, 2000, 99, 4);
  const McEstimate again = laplace_estimate(sampler, spec, 2000, 99, 4);
  CHECK(once.value == again.value);
  CHECK(once.std_error == again.std_error);
  // Draws are indexed per sample, so the worker split only reorders the
  // accumulation; the values agree to rounding.
  const McEstimate one_worker = laplace_estimate(sampler, spec, 2000, 99, 1);
  CHECK(one_worker.value == doctest::Approx(once.value).epsilon(1e-12));
  CHECK(one_worker.std_error == doctest::Approx(once.std_error).epsilon(1e-9));
}

TEST_CASE("generator closed forms on hand examples") {
  // Resampling only: b/2 * n(n-1) * mass^(n-1).
  const Dendrogram four = pair_space(2.0, 2.0, 3.0);
  CHECK(generator_apply(basis_monomial("one", 2), four, 0.0, 1.0) == doctest::Approx(4.0));
  // Drift only: a * n * mass^n.
  const Dendrogram three = pair_space(1.0, 2.0, 3.0);
  CHECK(generator_apply(basis_monomial("one", 1), three, 1.0, 0.0) == doctest::Approx(3.0));
  // Growth term: d/dt of r12 doubles along the flow, so two unit atoms at
  // distance 3 give 2 * mass^2 = 8, independent of the distance.
  const Dendrogram two = pair_space(1.0, 1.0, 3.0);
  CHECK(generator_apply(basis_monomial("r12", 2), two, 0.0, 0.0) == doctest::Approx(8.0));
  // Null space maps to zero.
  CHECK(generator_apply(basis_monomial("one", 2), Dendrogram::null(), 1.0, 1.0) == 0.0);

  // Truncated specs and specs without gradients are rejected.
  CHECK_THROWS_AS(
      generator_apply(basis_monomial("one", 2).with_depth(Height::of(1.0)), four, 0.0, 1.0),
      std::invalid_argument);
  MonomialSpec no_grad;
  no_grad.order = 2;
  no_grad.phi = [](const DistanceMatrix&) { return 1.0; };
  CHECK_THROWS_AS(generator_apply(no_grad, four, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("declared gradients pass a finite-difference check") {
  std::vector<DistanceMatrix> probes;
  {
    DistanceMatrix m(2);
    m.set(0, 1, Height::of(1.25));
    probes.push_back(m);
    DistanceMatrix t(3);
    t.set(0, 1, Height::of(0.5));
    t.set(0, 2, Height::of(2.0));
    t.set(1, 2, Height::of(2.0));
    probes.push_back(t);
  }
  for (const MonomialSpec& spec : probe_basis()) {
    if (!spec.gradient) {
      continue;
    }
    std::vector<DistanceMatrix> fitting;
    for (const DistanceMatrix& p : probes) {
      if (p.order() == spec.order) {
        fitting.push_back(p);
      }
    }
    if (fitting.empty()) {
      continue;
    }
    CHECK_MESSAGE(check_gradient(spec, fitting), "gradient mismatch for ", spec.name);
  }
}

TEST_CASE("basis tokens and budget guards") {
  CHECK_THROWS_AS(basis_monomial("nope", 2), std::invalid_argument);
  CHECK_THROWS_AS(basis_monomial("prod12x13", 2), std::invalid_argument);  // needs order 3
  CHECK(basis_monomial("bump:2:0.5", 2).name == "bump:2:0.5@2");

  const std::vector<MonomialSpec> basis = probe_basis();
  CHECK(basis.size() == 12);
  std::set<std::string> names;
  for (const MonomialSpec& spec : basis) {
    names.insert(spec.name);
  }
  CHECK(names.size() == basis.size());

  CounterRng rng(61, "test.poly.budget");
  const Dendrogram wide = random_tree(rng, 30);
  if (wide.atom_count() >= 3) {
    CHECK_THROWS_AS(eval_monomial(basis_monomial("one", 3), wide, 10), BudgetError);
  }
}

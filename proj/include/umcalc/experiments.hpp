#pragma once

#include <cstdint>
#include <vector>

#include "umcalc/random_forests.hpp"
#include "umcalc/report.hpp"

namespace umcalc {

/**
 * Reproducibility surface of the verification battery. Corpus sizes, sample
 * counts and tolerances are pinned inside each experiment; the seed, the
 * worker count and the z-threshold for statistical rows are the knobs a
 * caller may turn. Reports are byte-identical across reruns for a fixed
 * options value.
 */
struct SuiteOptions {
  std::uint64_t seed = 1729;
  unsigned workers = 4;
  /// |z| bound for statistical rows (the drift-rate check uses its own
  /// wider soft band).
  double sigma = 3.0;
};

/// Factorization round trip: rebuilding a forest from its primes reproduces
/// its truncation, over a seeded corpus and several depths per space.
ExperimentReport run_factorization_round_trip(const SuiteOptions& options);

/// Factoring a shallower truncation equals truncating the deeper primes and
/// refactoring, exactly.
ExperimentReport run_truncation_consistency(const SuiteOptions& options);

/// Truncated monomials are additive over concatenation at their depth.
ExperimentReport run_truncated_homomorphism(const SuiteOptions& options);

/// The pair-distance measure of a concatenation splits into the parts plus
/// the cross atom of weight 2*(mass u)*(mass v) at distance 2h, exactly.
ExperimentReport run_pair_measure_concat_identity(const SuiteOptions& options);

/// Ball counts add over concatenation and match the largest tuple order
/// whose distance-matrix measure still charges all-entries >= 2h, on an
/// exhaustive small-space corpus.
ExperimentReport run_ball_count_additivity(const SuiteOptions& options);

/// Power sums over the factorization: decomposition-side evaluation equals
/// the lifted single monomial of multiplied order.
ExperimentReport run_power_sum_dual(const SuiteOptions& options);

/// Compound Poisson forests: Monte Carlo -log Laplace vs the exact closed
/// form, the null-probability identity, and exact depth consistency of the
/// jump law.
ExperimentReport run_levy_khintchine_cpf(const SuiteOptions& options);

/// Concatenating n independent n-th-root draws reproduces the compound
/// Poisson law (Laplace comparison).
ExperimentReport run_root_concatenation(const SuiteOptions& options);

/// The excursion approximant n*E[1 - exp(-Phi)] under the n-th root
/// approaches the exact jump-law integral within its bias budget.
ExperimentReport run_excursion_approximant(const SuiteOptions& options);

/// Total mass of a Poisson star forest is infinitely divisible: empirical
/// -log E[exp(-s*mass)] matches the jump integral of the real Lévy measure.
ExperimentReport run_star_mass_infdiv(const SuiteOptions& options);

/// Trunks approximate the space: threshold test functions stop moving
/// exactly once 2h falls below the smallest gap between attained distances
/// and cutoffs.
ExperimentReport run_trunk_threshold(const SuiteOptions& options);

/// Branching generator: closed form for constant test functions, plus the
/// finite-population drift-rate check against a critical binary run.
ExperimentReport run_generator_closed_form(const SuiteOptions& options);

/// Branching property: evolving a concatenation equals the convolution of
/// the independently evolved parts (Laplace comparison).
ExperimentReport run_gw_branching(const SuiteOptions& options);

/// Coupled branching runs from a forest and an enlarged forest stay ordered:
/// the smaller run is a subforest at every checkpoint, exactly.
ExperimentReport run_gw_coupling(const SuiteOptions& options);

/// The algebraic battery on marked corpora: round trip, truncation
/// consistency, monomial additivity with mark weights, the pair-measure
/// identity, and mark-measure conservation.
ExperimentReport run_marked_suite(const SuiteOptions& options);

/// All experiments above, in a fixed order.
std::vector<ExperimentReport> run_full_suite(const SuiteOptions& options);

/// Two-jump compound Poisson model used by the verification commands: equal
/// weights on two two-atom trees (masses 1/2 and 1, diameters 1.5 and 1.3)
/// at depth 1. The jumps collide under truncation to depth 0.6, which
/// exercises the jump-law pushforward.
LevyModel demo_jump_law(double theta);

/// Parametrized variants of the statistical experiments, for command-line
/// use; the run_* functions above are these at pinned parameters.
ExperimentReport verify_lk(double theta, std::uint64_t samples, const SuiteOptions& options);
ExperimentReport verify_root(unsigned n_roots, double theta, std::uint64_t samples,
                             const SuiteOptions& options);
ExperimentReport verify_star_mass(std::uint64_t samples, const SuiteOptions& options);
ExperimentReport verify_branching(std::uint64_t samples, const SuiteOptions& options);

}  // namespace umcalc

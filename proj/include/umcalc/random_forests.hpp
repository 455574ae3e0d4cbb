#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "umcalc/budget.hpp"
#include "umcalc/dendrogram.hpp"
#include "umcalc/height.hpp"
#include "umcalc/polynomials.hpp"

namespace umcalc {

struct LevyAtom {
  double weight = 0.0;
  Dendrogram tree;
};

/**
 * Compound Poisson forest model at a fixed depth: a Poisson(theta) number of
 * i.i.d. picks from the finitely supported jump law, concatenated at the
 * depth. Jump trees are nonnull with diameter <= 2*depth; weights are
 * normalized on construction (their sum must be 1 within 1e-12).
 */
class LevyModel {
 public:
  LevyModel(double theta, Height depth, std::vector<LevyAtom> atoms);

  double theta() const { return theta_; }
  Height depth() const { return depth_; }
  const std::vector<LevyAtom>& atoms() const { return atoms_; }

 private:
  double theta_ = 0.0;
  Height depth_;
  std::vector<LevyAtom> atoms_;
};

/// One forest draw; deterministic in (model, seed).
Dendrogram sample_cpf(const LevyModel& model, std::uint64_t seed);

/**
 * Exact negative log Laplace functional of the model on the h-truncated
 * polynomial: theta * sum_k w_k (1 - exp(-Phi_h(atom_k))). Requires
 * 0 < h <= depth and a zero constant term (truncated polynomials must be
 * additive over the concatenation for the closed form to hold).
 */
double cpf_log_laplace_exact(const LevyModel& model, const PolynomialSpec& spec, Height h,
                             std::uint64_t budget = kDefaultTupleBudget);

/// Jump law at a shallower depth 0 < h <= depth: truncation pushforward;
/// isomorphic images merge, theta is unchanged.
LevyModel cpf_levy_at_depth(const LevyModel& model, Height h);

/// n-th convolution root: theta/n, same jump law.
LevyModel nth_root_cpf(const LevyModel& model, std::uint64_t n);

/**
 * Excursion-law estimator: n * E[1 - exp(-Phi_h(root draw))] under the n-th
 * root model, with standard error. Converges to the exact log-Laplace value
 * as n grows (relative bias of order theta/(2n)).
 */
McEstimate estimate_levy_functional(const LevyModel& model, std::uint64_t n,
                                    const PolynomialSpec& spec, Height h, std::uint64_t samples,
                                    std::uint64_t seed, unsigned workers = 1,
                                    std::uint64_t budget = kDefaultTupleBudget);

struct RealLevyAtom {
  double mass = 0.0;
  double rate = 0.0;
};

/**
 * Lévy measure on atom masses for infinitely divisible total mass. Either a
 * finite list of (mass, rate) atoms, or additionally a density on
 * [density_lower, density_upper] with a strictly positive small-jump
 * truncation threshold, so the measure has finite activity by construction.
 */
struct RealLevySpec {
  std::vector<RealLevyAtom> atoms;
  std::function<double(double)> density;
  double density_lower = 0.0;
  double density_upper = 0.0;

  void validate() const;
  /// Total Poisson intensity (atom rates plus the density integral).
  double total_rate() const;
  /// The negative log Laplace transform of the induced total mass at s >= 0:
  /// integral of (1 - exp(-s x)) against the measure.
  double log_laplace(double s) const;
};

/// Poisson star forest: one singleton per Poisson point, all at mutual
/// distance 2h. The empty configuration is the null space.
Dendrogram star_forest_from_levy(Height h, const RealLevySpec& nu, std::uint64_t seed);

/**
 * Individual-based critical binary branching: each individual carries mass
 * atom_mass, lives Exp(rate), then dies or splits in two with equal
 * probability. Distances double the time to the most recent common ancestor;
 * individuals with distinct initial roots sit at distance 2*horizon.
 */
struct GwConfig {
  std::uint64_t initial = 1;
  double rate = 1.0;
  double horizon = 1.0;
  double atom_mass = 1.0;
};
Dendrogram gw_genealogy(const GwConfig& config, std::uint64_t seed);

/**
 * Full event history of a branching run started from a forest whose atom
 * masses are multiples of atom_mass (each atom of mass k*atom_mass holds k
 * founding individuals). Snapshots at any time up to the horizon come from
 * the same realization. Randomness is keyed per founding individual in
 * canonical leaf order, so runs started from a common sub-forest couple.
 */
class GwHistory {
 public:
  struct Individual {
    double birth = 0.0;
    double death = 0.0;  // infinity when alive at the horizon
    std::size_t child_a = kNone;
    std::size_t child_b = kNone;

    static constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  };

  Dendrogram start;
  double horizon = 0.0;
  double rate = 0.0;
  double atom_mass = 1.0;
  /// Founding individuals per canonical start leaf.
  std::vector<std::vector<std::size_t>> founders_per_leaf;
  std::vector<Individual> individuals;
};

GwHistory gw_simulate(const Dendrogram& start, double horizon, double rate, double atom_mass,
                      std::uint64_t seed, std::string_view stream = "gw");

/// Genealogy of the individuals alive at the given time (start distances are
/// stretched by 2*time; survivor subtrees replace the founders).
Dendrogram gw_snapshot(const GwHistory& history, double time);

/// Branching run over one horizon, observed at the horizon.
Dendrogram gw_evolve(const Dendrogram& start, double time, double rate, double atom_mass,
                     std::uint64_t seed, std::string_view stream = "gw");

/**
 * Evolves each part with its own randomness stream and concatenates the
 * results at depth h + time (ancestors at distance 2h have descendants at
 * distance 2(h + time)). Part index, not content, selects the stream, so a
 * shared prefix of parts yields identical sub-runs.
 */
Dendrogram gw_evolve_parts(std::span<const Dendrogram> parts, Height h, double time, double rate,
                           double atom_mass, std::uint64_t seed);

using SeededSampler = std::function<Dendrogram(std::uint64_t)>;

/// Independent draws from the two samplers, concatenated at depth h.
Dendrogram branching_convolution_sample(const SeededSampler& left, const SeededSampler& right,
                                        Height h, std::uint64_t seed);

}  // namespace umcalc

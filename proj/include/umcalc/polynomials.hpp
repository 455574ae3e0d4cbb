#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "umcalc/budget.hpp"
#include "umcalc/dendrogram.hpp"
#include "umcalc/distance_matrix.hpp"
#include "umcalc/height.hpp"

namespace umcalc {

/**
 * Law of the distance matrix of m independent mass-proportional atom draws
 * (with repetition), scaled to total weight (total mass)^m. Finitely
 * supported; atoms aggregated by the quantized matrix encoding. Order 1 is
 * the total mass on the one-point matrix.
 */
class DistanceMatrixMeasure {
 public:
  struct WeightedMatrix {
    DistanceMatrix matrix;
    double weight;
  };

  DistanceMatrixMeasure() = default;
  explicit DistanceMatrixMeasure(std::size_t order) : order_(order) {}

  std::size_t order() const { return order_; }
  const std::vector<WeightedMatrix>& support() const { return support_; }
  double total_weight() const;

  void add(const DistanceMatrix& matrix, double weight);
  void add_measure(const DistanceMatrixMeasure& other);
  DistanceMatrixMeasure scaled(double factor) const;

  /// Total weight of matrices whose off-diagonal entries all reach `bound`.
  double weight_all_entries_at_least(Height bound) const;

  /// Exact multiset equality of supports (quantized matrices, exact weights).
  friend bool operator==(const DistanceMatrixMeasure&, const DistanceMatrixMeasure&);

 private:
  std::size_t order_ = 0;
  // Sorted by matrix key; weights of equal matrices are accumulated.
  std::vector<WeightedMatrix> support_;
};

DistanceMatrixMeasure distance_matrix_measure(std::size_t order, const Dendrogram& d,
                                              std::uint64_t budget = kDefaultTupleBudget);

using TestFunction = std::function<double(const DistanceMatrix&)>;
/// Partial derivative of the test function in the (i, j) entry.
using TestGradient = std::function<double(const DistanceMatrix&, std::size_t, std::size_t)>;

/**
 * Monomial: integrates a bounded test function of the pairwise distances of
 * an order-sized atom tuple against the tuple law. An optional depth h
 * multiplies the test function by the indicator that every pairwise distance
 * stays strictly below 2h (upper truncation); truncated monomials are
 * additive over concatenations at depth h.
 */
struct MonomialSpec {
  std::size_t order = 1;
  TestFunction phi;
  TestGradient gradient;  // empty when unavailable
  std::optional<Height> depth;
  /// Declared bound on |phi| over the relevant compact (reporting only).
  double sup_bound = 1.0;
  std::string name;

  MonomialSpec with_depth(Height h) const;
  MonomialSpec without_depth() const;
};

/// Constant plus a sum of monomials. Products are expressed as higher-order
/// monomials with factored test functions.
struct PolynomialSpec {
  double constant = 0.0;
  std::vector<MonomialSpec> terms;
  std::string name;

  PolynomialSpec with_depth(Height h) const;
};

/// Exact evaluation by tuple enumeration (compensated summation).
double eval_monomial(const MonomialSpec& spec, const Dendrogram& d,
                     std::uint64_t budget = kDefaultTupleBudget);

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
};

/// Monte Carlo evaluation: mass-proportional tuples, scaled by total_mass^m.
McEstimate eval_monomial_mc(const MonomialSpec& spec, const Dendrogram& d, std::uint64_t samples,
                            std::uint64_t seed);

double eval_polynomial(const PolynomialSpec& spec, const Dendrogram& d,
                       std::uint64_t budget = kDefaultTupleBudget);

/**
 * Power sum over the factorization at the spec's depth: both the direct
 * route sum_i (monomial on prime i)^n and the equivalent single monomial of
 * order order*n with the lifted test function (blockwise products bridged by
 * strict 2h indicators). The two must agree.
 */
struct PowerSumResult {
  double via_decomposition = 0.0;
  double via_lifted = 0.0;
};
PowerSumResult power_sum_monomial(const MonomialSpec& spec, std::size_t n, const Dendrogram& d,
                                  std::uint64_t budget = kDefaultTupleBudget);

/// The lifted order*n monomial used by the power-sum identity.
MonomialSpec lift_power_sum(const MonomialSpec& spec, std::size_t n);

/// Seeded Laplace-functional estimate E[exp(-Phi(sample))] with standard
/// error; per-index sub-seeds make the result independent of the worker
/// split.
McEstimate laplace_estimate(const std::function<Dendrogram(std::uint64_t)>& sampler,
                            const PolynomialSpec& spec, std::uint64_t samples, std::uint64_t seed,
                            unsigned workers = 1, std::uint64_t budget = kDefaultTupleBudget);

/**
 * Branching-dynamics generator on a monomial: gradient growth plus linear
 * drift a and pairwise resampling at rate b/total mass. Requires an
 * untruncated spec with gradient; returns 0 on the null space.
 */
double generator_apply(const MonomialSpec& spec, const Dendrogram& d, double a, double b,
                       std::uint64_t budget = kDefaultTupleBudget);

/// Central-difference check of the declared gradient on probe matrices.
bool check_gradient(const MonomialSpec& spec, std::span<const DistanceMatrix> probes,
                    double step = 1e-5, double rel_tol = 1e-6);

/**
 * Built-in test-function basis, addressable by token:
 *   one          constant 1 (any order)
 *   r12          first off-diagonal entry (order >= 2)
 *   r12sq        its square
 *   sumr         sum of all entries
 *   expnegsum    exp(-sum of entries)
 *   prod12x13    r12 * r13 (order >= 3)
 *   bump:c:w     product of smoothstep((c - r_ij)/w) over all pairs
 * All come with gradients.
 */
MonomialSpec basis_monomial(const std::string& token, std::size_t order);

/// The fixed probe basis used by separation and homomorphism tests.
std::vector<MonomialSpec> probe_basis();

}  // namespace umcalc

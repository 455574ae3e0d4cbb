#pragma once

#include <cstdint>

#include "umcalc/budget.hpp"
#include "umcalc/dendrogram.hpp"

namespace umcalc {

/**
 * Comparison surrogate built from exact optimal transport between tuple-law
 * measures: sum over orders m = 2..m_max of 2^-m times the Wasserstein-1
 * distance between the order-m distance-matrix measures (max-norm ground
 * metric, mass imbalance routed to a sink at the larger diameter), plus the
 * total-mass gap. Zero on isomorphic inputs; a pure mass gap contributes
 * exactly that gap.
 */
double gw_surrogate_distance(const Dendrogram& a, const Dendrogram& b, std::size_t m_max = 3,
                             std::uint64_t budget = kDefaultTupleBudget);

}  // namespace umcalc

#pragma once

#include <functional>
#include <span>

namespace umcalc {

/**
 * Balanced transportation problem: least transport cost between nonnegative
 * supplies and demands (equal totals) under a nonnegative dense cost. Solved
 * exactly by successive shortest augmenting paths with node potentials; each
 * augmentation saturates a supply or a demand, so at most
 * supplies+demands rounds are needed.
 */
double transport_cost(std::span<const double> supply, std::span<const double> demand,
                      const std::function<double(std::size_t, std::size_t)>& cost);

}  // namespace umcalc

#pragma once

#include <cstdint>
#include <stdexcept>

namespace umcalc {

/// Thrown when an exact enumeration would exceed its tuple budget; callers
/// should fall back to the Monte Carlo path.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr std::uint64_t kDefaultTupleBudget = 10'000'000;

}  // namespace umcalc

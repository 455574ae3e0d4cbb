#include "umcalc/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "umcalc/polynomials.hpp"
#include "umcalc/transport.hpp"

namespace umcalc {
namespace {

double w1_with_sink(const DistanceMatrixMeasure& mu, const DistanceMatrixMeasure& nu,
                    double sink_distance) {
  const auto& sa = mu.support();
  const auto& sb = nu.support();
  const double ta = mu.total_weight();
  const double tb = nu.total_weight();

  // The lighter side gains a sink atom at the penalty distance so totals
  // balance; transporting to the sink costs the penalty regardless of
  // source.
  std::vector<double> supply;
  std::vector<double> demand;
  supply.reserve(sa.size() + 1);
  demand.reserve(sb.size() + 1);
  for (const auto& wm : sa) {
    supply.push_back(wm.weight);
  }
  for (const auto& wm : sb) {
    demand.push_back(wm.weight);
  }
  const double gap = ta - tb;
  bool a_sink = false;
  bool b_sink = false;
  if (gap < 0) {
    supply.push_back(-gap);
    a_sink = true;
  } else if (gap > 0) {
    demand.push_back(gap);
    b_sink = true;
  }

  auto cost = [&](std::size_t i, std::size_t j) -> double {
    const bool i_is_sink = a_sink && i == sa.size();
    const bool j_is_sink = b_sink && j == sb.size();
    if (i_is_sink || j_is_sink) {
      return sink_distance;
    }
    return sa[i].matrix.max_norm_distance(sb[j].matrix);
  };
  return transport_cost(supply, demand, cost);
}

}  // namespace

double gw_surrogate_distance(const Dendrogram& a, const Dendrogram& b, std::size_t m_max,
                             std::uint64_t budget) {
  if (m_max < 2) {
    throw std::invalid_argument("surrogate needs m_max >= 2");
  }
  const Dendrogram ca = canonicalize(a);
  const Dendrogram cb = canonicalize(b);
  const double sink = std::max(ca.diameter().value(), cb.diameter().value());

  double out = std::abs(ca.total_mass() - cb.total_mass());
  double scale = 0.25;
  for (std::size_t m = 2; m <= m_max; ++m) {
    const DistanceMatrixMeasure mu = distance_matrix_measure(m, ca, budget);
    const DistanceMatrixMeasure nu = distance_matrix_measure(m, cb, budget);
    out += scale * w1_with_sink(mu, nu, sink);
    scale *= 0.5;
  }
  return out;
}

}  // namespace umcalc

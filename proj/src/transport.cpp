#include "umcalc/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace umcalc {

double transport_cost(std::span<const double> supply, std::span<const double> demand,
                      const std::function<double(std::size_t, std::size_t)>& cost) {
  const std::size_t n = supply.size();
  const std::size_t m = demand.size();
  const double total_supply = std::accumulate(supply.begin(), supply.end(), 0.0);
  const double total_demand = std::accumulate(demand.begin(), demand.end(), 0.0);
  for (double s : supply) {
    if (!(s >= 0)) throw std::invalid_argument("negative supply");
  }
  for (double d : demand) {
    if (!(d >= 0)) throw std::invalid_argument("negative demand");
  }
  if (std::abs(total_supply - total_demand) >
      1e-9 * std::max(1.0, std::max(total_supply, total_demand))) {
    throw std::invalid_argument("transport requires balanced totals");
  }
  if (n == 0 || m == 0 || total_supply == 0.0) {
    return 0.0;
  }

  std::vector<std::vector<double>> c(n, std::vector<double>(m));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      c[i][j] = cost(i, j);
      if (!(c[i][j] >= 0) || !std::isfinite(c[i][j])) {
        throw std::invalid_argument("transport costs must be finite and nonnegative");
      }
    }
  }

  // Node ids: sources 0..n-1, sinks n..n+m-1. Potentials keep reduced costs
  // nonnegative so plain Dijkstra applies; each augmentation zeroes a supply,
  // a demand or a flow value exactly (the bottleneck is copied, not
  // recomputed), so no tolerance is involved in termination.
  const std::size_t total = n + m;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<double> rem_supply(supply.begin(), supply.end());
  std::vector<double> rem_demand(demand.begin(), demand.end());
  std::vector<std::vector<double>> flow(n, std::vector<double>(m, 0.0));
  std::vector<double> pot(total, 0.0);
  std::vector<double> dist(total);
  std::vector<std::size_t> prev(total);
  std::vector<bool> done(total);

  const std::size_t iteration_cap = 16 * total * total + 64;
  std::size_t iterations = 0;

  auto has_supply = [&] {
    return std::any_of(rem_supply.begin(), rem_supply.end(), [](double v) { return v > 0; });
  };

  while (has_supply()) {
    if (++iterations > iteration_cap) {
      throw std::logic_error("transport solver failed to converge");
    }
    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(prev.begin(), prev.end(), kNone);
    std::fill(done.begin(), done.end(), false);
    for (std::size_t i = 0; i < n; ++i) {
      if (rem_supply[i] > 0) {
        dist[i] = 0.0;
      }
    }
    for (std::size_t round = 0; round < total; ++round) {
      std::size_t u = kNone;
      double best = kInf;
      for (std::size_t v = 0; v < total; ++v) {
        if (!done[v] && dist[v] < best) {
          best = dist[v];
          u = v;
        }
      }
      if (u == kNone) {
        break;
      }
      done[u] = true;
      if (u < n) {
        for (std::size_t j = 0; j < m; ++j) {
          const double rc = c[u][j] + pot[u] - pot[n + j];
          if (dist[u] + rc < dist[n + j]) {
            dist[n + j] = dist[u] + rc;
            prev[n + j] = u;
          }
        }
      } else {
        const std::size_t j = u - n;
        for (std::size_t i = 0; i < n; ++i) {
          if (flow[i][j] > 0) {
            const double rc = -c[i][j] + pot[u] - pot[i];
            if (dist[u] + rc < dist[i]) {
              dist[i] = dist[u] + rc;
              prev[i] = u;
            }
          }
        }
      }
    }

    std::size_t target = kNone;
    double best = kInf;
    for (std::size_t j = 0; j < m; ++j) {
      if (rem_demand[j] > 0 && dist[n + j] < best) {
        best = dist[n + j];
        target = n + j;
      }
    }
    if (target == kNone) {
      throw std::logic_error("transport: no augmenting path despite remaining supply");
    }

    double push = rem_demand[target - n];
    std::size_t origin = kNone;
    for (std::size_t v = target;;) {
      const std::size_t u = prev[v];
      if (u == kNone) {
        origin = v;
        break;
      }
      if (u >= n) {
        push = std::min(push, flow[v][u - n]);
      }
      v = u;
    }
    push = std::min(push, rem_supply[origin]);

    for (std::size_t v = target;;) {
      const std::size_t u = prev[v];
      if (u == kNone) {
        break;
      }
      if (u < n) {
        flow[u][v - n] += push;
      } else {
        flow[v][u - n] =
            (flow[v][u - n] == push) ? 0.0 : flow[v][u - n] - push;
      }
      v = u;
    }
    rem_supply[origin] = (rem_supply[origin] == push) ? 0.0 : rem_supply[origin] - push;
    rem_demand[target - n] =
        (rem_demand[target - n] == push) ? 0.0 : rem_demand[target - n] - push;

    const double cap = dist[target];
    for (std::size_t v = 0; v < total; ++v) {
      pot[v] += std::min(dist[v], cap);
    }
  }

  double result = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      result += flow[i][j] * c[i][j];
    }
  }
  return result;
}

}  // namespace umcalc

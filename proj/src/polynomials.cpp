#include "umcalc/polynomials.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <thread>

#include "umcalc/detail/tuple_enum.hpp"
#include "umcalc/rng.hpp"
#include "umcalc/semigroup.hpp"

namespace umcalc {

namespace detail {

std::uint64_t checked_tuple_count(std::size_t n, std::size_t order, std::uint64_t budget) {
  std::uint64_t count = 1;
  for (std::size_t p = 0; p < order; ++p) {
    if (n != 0 && count > budget / n + 1) {
      throw BudgetError("tuple enumeration exceeds budget");
    }
    count *= n;
  }
  if (count > budget) {
    throw BudgetError("tuple enumeration exceeds budget: " + std::to_string(count) + " > " +
                      std::to_string(budget));
  }
  return count;
}

}  // namespace detail

namespace {

void require_spec(const MonomialSpec& spec) {
  if (spec.order == 0) {
    throw std::invalid_argument("monomial order must be at least 1");
  }
  if (!spec.phi) {
    throw std::invalid_argument("monomial lacks a test function");
  }
  if (spec.depth && spec.depth->is_negative()) {
    throw std::invalid_argument("monomial depth must be nonnegative");
  }
}

bool passes_truncation(const DistanceMatrix& tuple, const std::optional<Height>& depth) {
  if (!depth) {
    return true;
  }
  return tuple.all_entries_below(depth->doubled());
}

}  // namespace

double DistanceMatrixMeasure::total_weight() const {
  detail::KahanSum sum;
  for (const WeightedMatrix& wm : support_) {
    sum.add(wm.weight);
  }
  return sum.value();
}

void DistanceMatrixMeasure::add(const DistanceMatrix& matrix, double weight) {
  if (matrix.order() != order_) {
    throw std::invalid_argument("matrix order does not match measure order");
  }
  if (!(weight > 0)) {
    throw std::invalid_argument("measure weights must be positive");
  }
  const std::string key = matrix.key();
  auto it = std::lower_bound(support_.begin(), support_.end(), key,
                             [](const WeightedMatrix& wm, const std::string& k) {
                               return wm.matrix.key() < k;
                             });
  if (it != support_.end() && it->matrix.key() == key) {
    it->weight += weight;
  } else {
    support_.insert(it, WeightedMatrix{matrix, weight});
  }
}

void DistanceMatrixMeasure::add_measure(const DistanceMatrixMeasure& other) {
  if (other.order_ != order_) {
    throw std::invalid_argument("measure orders differ");
  }
  for (const WeightedMatrix& wm : other.support_) {
    add(wm.matrix, wm.weight);
  }
}

DistanceMatrixMeasure DistanceMatrixMeasure::scaled(double factor) const {
  if (!(factor >= 0)) {
    throw std::invalid_argument("measure scale must be nonnegative");
  }
  DistanceMatrixMeasure out(order_);
  if (factor == 0) {
    return out;
  }
  out.support_ = support_;
  for (WeightedMatrix& wm : out.support_) {
    wm.weight *= factor;
  }
  return out;
}

double DistanceMatrixMeasure::weight_all_entries_at_least(Height bound) const {
  detail::KahanSum sum;
  for (const WeightedMatrix& wm : support_) {
    if (wm.matrix.order() < 2 || wm.matrix.min_off_diagonal() >= bound) {
      sum.add(wm.weight);
    }
  }
  return sum.value();
}

bool operator==(const DistanceMatrixMeasure& a, const DistanceMatrixMeasure& b) {
  if (a.order_ != b.order_ || a.support_.size() != b.support_.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.support_.size(); ++i) {
    if (a.support_[i].weight != b.support_[i].weight ||
        !(a.support_[i].matrix == b.support_[i].matrix)) {
      return false;
    }
  }
  return true;
}

DistanceMatrixMeasure distance_matrix_measure(std::size_t order, const Dendrogram& d,
                                              std::uint64_t budget) {
  if (order == 0) {
    throw std::invalid_argument("measure order must be at least 1");
  }
  const SupportData support = to_distance_matrix(d);
  std::map<std::string, std::pair<DistanceMatrix, detail::KahanSum>> agg;
  detail::for_each_tuple(support, order, budget,
                         [&](const DistanceMatrix& tuple, double weight, auto) {
                           auto [it, inserted] = agg.try_emplace(tuple.key(), tuple,
                                                                 detail::KahanSum{});
                           if (inserted) {
                             it->second.first = tuple;
                           }
                           it->second.second.add(weight);
                         });
  DistanceMatrixMeasure out(order);
  for (auto& [key, entry] : agg) {
    const double w = entry.second.value();
    if (w > 0) {
      out.add(entry.first, w);
    }
  }
  return out;
}

MonomialSpec MonomialSpec::with_depth(Height h) const {
  MonomialSpec out = *this;
  out.depth = depth ? depth->min(h) : h;
  return out;
}

MonomialSpec MonomialSpec::without_depth() const {
  MonomialSpec out = *this;
  out.depth.reset();
  return out;
}

PolynomialSpec PolynomialSpec::with_depth(Height h) const {
  PolynomialSpec out = *this;
  for (MonomialSpec& term : out.terms) {
    term = term.with_depth(h);
  }
  return out;
}

double eval_monomial(const MonomialSpec& spec, const Dendrogram& d, std::uint64_t budget) {
  require_spec(spec);
  const SupportData support = to_distance_matrix(d);
  detail::KahanSum sum;
  detail::for_each_tuple(support, spec.order, budget,
                         [&](const DistanceMatrix& tuple, double weight, auto) {
                           if (weight != 0 && passes_truncation(tuple, spec.depth)) {
                             sum.add(weight * spec.phi(tuple));
                           }
                         });
  return sum.value();
}

McEstimate eval_monomial_mc(const MonomialSpec& spec, const Dendrogram& d, std::uint64_t samples,
                            std::uint64_t seed) {
  require_spec(spec);
  if (samples == 0) {
    throw std::invalid_argument("Monte Carlo evaluation needs at least one sample");
  }
  const SupportData support = to_distance_matrix(d);
  const double total = support.total_mass();
  if (support.size() == 0 || total <= 0) {
    return McEstimate{0.0, 0.0, samples};
  }
  double scale = 1.0;
  for (std::size_t p = 0; p < spec.order; ++p) {
    scale *= total;
  }

  CounterRng rng(seed, "poly.mc");
  std::vector<std::size_t> idx(spec.order);
  DistanceMatrix tuple(spec.order);
  double mean = 0.0;
  double m2 = 0.0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    for (std::size_t p = 0; p < spec.order; ++p) {
      idx[p] = rng.categorical(support.masses);
    }
    for (std::size_t p = 0; p < spec.order; ++p) {
      for (std::size_t q = p + 1; q < spec.order; ++q) {
        tuple.set(p, q, idx[p] == idx[q] ? Height() : support.distances.at(idx[p], idx[q]));
      }
    }
    const double value = passes_truncation(tuple, spec.depth) ? spec.phi(tuple) : 0.0;
    const double delta = value - mean;
    mean += delta / static_cast<double>(s + 1);
    m2 += delta * (value - mean);
  }
  const double variance = samples > 1 ? m2 / static_cast<double>(samples - 1) : 0.0;
  return McEstimate{scale * mean,
                    scale * std::sqrt(variance / static_cast<double>(samples)), samples};
}

double eval_polynomial(const PolynomialSpec& spec, const Dendrogram& d, std::uint64_t budget) {
  double out = spec.constant;
  for (const MonomialSpec& term : spec.terms) {
    out += eval_monomial(term, d, budget);
  }
  return out;
}

MonomialSpec lift_power_sum(const MonomialSpec& spec, std::size_t n) {
  require_spec(spec);
  if (!spec.depth) {
    throw std::invalid_argument("power sum requires a truncated monomial");
  }
  if (n == 0) {
    throw std::invalid_argument("power sum exponent must be at least 1");
  }
  const std::size_t m = spec.order;
  const Height two_h = spec.depth->doubled();
  const TestFunction base = spec.phi;

  MonomialSpec lifted;
  lifted.order = m * n;
  lifted.name = spec.name + "^" + std::to_string(n) + "-lift";
  lifted.sup_bound = std::pow(spec.sup_bound, static_cast<double>(n));
  lifted.phi = [base, m, n, two_h](const DistanceMatrix& matrix) -> double {
    // Blocks p*m..(p+1)*m-1 evaluate the base function under its own strict
    // truncation; consecutive blocks are bridged by a strict 2h indicator,
    // which pins all blocks to one prime of the factorization.
    double value = 1.0;
    DistanceMatrix block(m);
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
          const Height entry = matrix.at(p * m + i, p * m + j);
          if (entry >= two_h) {
            return 0.0;
          }
          block.set(i, j, entry);
        }
      }
      value *= base(block);
      if (p + 1 < n && matrix.at(p * m + m - 1, p * m + m) >= two_h) {
        return 0.0;
      }
    }
    return value;
  };
  return lifted;
}

PowerSumResult power_sum_monomial(const MonomialSpec& spec, std::size_t n, const Dendrogram& d,
                                  std::uint64_t budget) {
  require_spec(spec);
  if (!spec.depth) {
    throw std::invalid_argument("power sum requires a truncated monomial");
  }
  if (n == 0) {
    throw std::invalid_argument("power sum exponent must be at least 1");
  }
  PowerSumResult out;
  detail::KahanSum direct;
  const Dendrogram forest = truncate(*spec.depth, d);
  std::vector<Dendrogram> primes;
  {
    // Maximal open-ball components at the spec depth.
    struct Walk {
      static void run(const Dendrogram& d, Height two_h, std::vector<Dendrogram>* out) {
        if (d.is_null()) {
          return;
        }
        if (d.is_leaf() || d.root_height() < two_h) {
          out->push_back(d);
          return;
        }
        for (const Dendrogram& c : d.children()) {
          run(c, two_h, out);
        }
      }
    };
    Walk::run(forest, spec.depth->doubled(), &primes);
  }
  for (const Dendrogram& prime : primes) {
    const double phi = eval_monomial(spec, prime, budget);
    double power = 1.0;
    for (std::size_t p = 0; p < n; ++p) {
      power *= phi;
    }
    direct.add(power);
  }
  out.via_decomposition = direct.value();
  out.via_lifted = eval_monomial(lift_power_sum(spec, n), d, budget);
  return out;
}

McEstimate laplace_estimate(const std::function<Dendrogram(std::uint64_t)>& sampler,
                            const PolynomialSpec& spec, std::uint64_t samples, std::uint64_t seed,
                            unsigned workers, std::uint64_t budget) {
  if (!sampler) {
    throw std::invalid_argument("laplace_estimate needs a sampler");
  }
  if (samples == 0) {
    throw std::invalid_argument("laplace_estimate needs at least one sample");
  }
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(
                                                         std::min<std::uint64_t>(samples, 64))));

  struct Accum {
    std::uint64_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
      ++count;
      const double delta = x - mean;
      mean += delta / static_cast<double>(count);
      m2 += delta * (x - mean);
    }
    void merge(const Accum& o) {
      if (o.count == 0) {
        return;
      }
      if (count == 0) {
        *this = o;
        return;
      }
      const double delta = o.mean - mean;
      const std::uint64_t total = count + o.count;
      m2 += o.m2 + delta * delta * static_cast<double>(count) * static_cast<double>(o.count) /
                       static_cast<double>(total);
      mean += delta * static_cast<double>(o.count) / static_cast<double>(total);
      count = total;
    }
  };

  std::vector<Accum> parts(workers);
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run_range = [&](unsigned w, std::uint64_t lo, std::uint64_t hi) {
    try {
      for (std::uint64_t i = lo; i < hi; ++i) {
        const Dendrogram draw = sampler(derive_seed(seed, i));
        parts[w].add(std::exp(-eval_polynomial(spec, draw, budget)));
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) {
        failure = std::current_exception();
      }
    }
  };

  if (workers == 1) {
    run_range(0, 0, samples);
  } else {
    std::vector<std::thread> threads;
    const std::uint64_t chunk = (samples + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::uint64_t lo = std::min<std::uint64_t>(samples, w * chunk);
      const std::uint64_t hi = std::min<std::uint64_t>(samples, lo + chunk);
      threads.emplace_back(run_range, w, lo, hi);
    }
    for (std::thread& t : threads) {
      t.join();
    }
  }
  if (failure) {
    std::rethrow_exception(failure);
  }

  Accum total;
  for (const Accum& part : parts) {
    total.merge(part);
  }
  const double variance =
      total.count > 1 ? total.m2 / static_cast<double>(total.count - 1) : 0.0;
  return McEstimate{total.mean, std::sqrt(variance / static_cast<double>(total.count)),
                    total.count};
}

double generator_apply(const MonomialSpec& spec, const Dendrogram& d, double a, double b,
                       std::uint64_t budget) {
  require_spec(spec);
  if (spec.depth) {
    throw std::invalid_argument("generator expects an untruncated monomial");
  }
  if (!spec.gradient) {
    throw std::invalid_argument("generator needs the test-function gradient");
  }
  const Dendrogram canon = canonicalize(d);
  if (canon.is_null()) {
    return 0.0;
  }
  const double total = canon.total_mass();
  const std::size_t n = spec.order;

  MonomialSpec growth = spec.without_depth();
  const TestGradient grad = spec.gradient;
  growth.phi = [grad, n](const DistanceMatrix& matrix) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        sum += grad(matrix, i, j);
      }
    }
    return 2.0 * sum;
  };
  growth.gradient = nullptr;
  double out = eval_monomial(growth, canon, budget);

  out += a * static_cast<double>(n) * eval_monomial(spec, canon, budget);

  if (n >= 2 && b != 0.0) {
    const TestFunction base = spec.phi;
    detail::KahanSum resampled;
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t l = k + 1; l < n; ++l) {
        MonomialSpec theta = spec.without_depth();
        theta.gradient = nullptr;
        theta.phi = [base, k, l](const DistanceMatrix& matrix) {
          return base(matrix.resample(k, l));
        };
        resampled.add(eval_monomial(theta, canon, budget));
      }
    }
    out += b / total * resampled.value();
  }
  return out;
}

bool check_gradient(const MonomialSpec& spec, std::span<const DistanceMatrix> probes, double step,
                    double rel_tol) {
  require_spec(spec);
  if (!spec.gradient) {
    return false;
  }
  for (const DistanceMatrix& probe : probes) {
    if (probe.order() != spec.order) {
      throw std::invalid_argument("probe order does not match spec order");
    }
    for (std::size_t i = 0; i < spec.order; ++i) {
      for (std::size_t j = i + 1; j < spec.order; ++j) {
        DistanceMatrix up = probe;
        DistanceMatrix down = probe;
        up.set(i, j, Height::of(probe.r(i, j) + step));
        down.set(i, j, Height::of(probe.r(i, j) - step));
        const double numeric = (spec.phi(up) - spec.phi(down)) / (up.r(i, j) - down.r(i, j));
        const double declared = spec.gradient(probe, i, j);
        if (std::abs(numeric - declared) > rel_tol * std::max(1.0, std::abs(numeric))) {
          return false;
        }
      }
    }
  }
  return true;
}

namespace {

double smoothstep(double x) {
  if (x <= 0) {
    return 0.0;
  }
  if (x >= 1) {
    return 1.0;
  }
  return x * x * (3.0 - 2.0 * x);
}

double smoothstep_d(double x) {
  if (x <= 0 || x >= 1) {
    return 0.0;
  }
  return 6.0 * x * (1.0 - x);
}

}  // namespace

MonomialSpec basis_monomial(const std::string& token, std::size_t order) {
  MonomialSpec spec;
  spec.order = order;
  spec.name = token + "@" + std::to_string(order);
  if (order == 0) {
    throw std::invalid_argument("monomial order must be at least 1");
  }

  if (token == "one") {
    spec.phi = [](const DistanceMatrix&) { return 1.0; };
    spec.gradient = [](const DistanceMatrix&, std::size_t, std::size_t) { return 0.0; };
    spec.sup_bound = 1.0;
    return spec;
  }
  if (token == "r12") {
    if (order < 2) {
      throw std::invalid_argument("r12 needs order >= 2");
    }
    spec.phi = [](const DistanceMatrix& m) { return m.r(0, 1); };
    spec.gradient = [](const DistanceMatrix&, std::size_t i, std::size_t j) {
      return (i == 0 && j == 1) ? 1.0 : 0.0;
    };
    spec.sup_bound = 16.0;
    return spec;
  }
  if (token == "r12sq") {
    if (order < 2) {
      throw std::invalid_argument("r12sq needs order >= 2");
    }
    spec.phi = [](const DistanceMatrix& m) { return m.r(0, 1) * m.r(0, 1); };
    spec.gradient = [](const DistanceMatrix& m, std::size_t i, std::size_t j) {
      return (i == 0 && j == 1) ? 2.0 * m.r(0, 1) : 0.0;
    };
    spec.sup_bound = 256.0;
    return spec;
  }
  if (token == "sumr") {
    if (order < 2) {
      throw std::invalid_argument("sumr needs order >= 2");
    }
    spec.phi = [order](const DistanceMatrix& m) {
      double s = 0.0;
      for (std::size_t i = 0; i < order; ++i) {
        for (std::size_t j = i + 1; j < order; ++j) {
          s += m.r(i, j);
        }
      }
      return s;
    };
    spec.gradient = [](const DistanceMatrix&, std::size_t, std::size_t) { return 1.0; };
    spec.sup_bound = 96.0;
    return spec;
  }
  if (token == "expnegsum") {
    spec.phi = [order](const DistanceMatrix& m) {
      double s = 0.0;
      for (std::size_t i = 0; i < order; ++i) {
        for (std::size_t j = i + 1; j < order; ++j) {
          s += m.r(i, j);
        }
      }
      return std::exp(-s);
    };
    spec.gradient = [order](const DistanceMatrix& m, std::size_t, std::size_t) {
      double s = 0.0;
      for (std::size_t i = 0; i < order; ++i) {
        for (std::size_t j = i + 1; j < order; ++j) {
          s += m.r(i, j);
        }
      }
      return -std::exp(-s);
    };
    spec.sup_bound = 1.0;
    return spec;
  }
  if (token == "prod12x13") {
    if (order < 3) {
      throw std::invalid_argument("prod12x13 needs order >= 3");
    }
    spec.phi = [](const DistanceMatrix& m) { return m.r(0, 1) * m.r(0, 2); };
    spec.gradient = [](const DistanceMatrix& m, std::size_t i, std::size_t j) {
      if (i == 0 && j == 1) {
        return m.r(0, 2);
      }
      if (i == 0 && j == 2) {
        return m.r(0, 1);
      }
      return 0.0;
    };
    spec.sup_bound = 256.0;
    return spec;
  }
  if (token.rfind("bump:", 0) == 0) {
    const std::size_t sep = token.find(':', 5);
    if (sep == std::string::npos) {
      throw std::invalid_argument("bump token must look like bump:center:width");
    }
    const double center = std::stod(token.substr(5, sep - 5));
    const double width = std::stod(token.substr(sep + 1));
    if (!(width > 0)) {
      throw std::invalid_argument("bump width must be positive");
    }
    spec.phi = [order, center, width](const DistanceMatrix& m) {
      double value = 1.0;
      for (std::size_t i = 0; i < order; ++i) {
        for (std::size_t j = i + 1; j < order; ++j) {
          value *= smoothstep((center - m.r(i, j)) / width);
        }
      }
      return value;
    };
    spec.gradient = [order, center, width](const DistanceMatrix& m, std::size_t gi,
                                           std::size_t gj) {
      double rest = 1.0;
      for (std::size_t i = 0; i < order; ++i) {
        for (std::size_t j = i + 1; j < order; ++j) {
          if (i == gi && j == gj) {
            continue;
          }
          rest *= smoothstep((center - m.r(i, j)) / width);
        }
      }
      return rest * smoothstep_d((center - m.r(gi, gj)) / width) * (-1.0 / width);
    };
    spec.sup_bound = 1.0;
    return spec;
  }
  throw std::invalid_argument("unknown test-function token: " + token);
}

std::vector<MonomialSpec> probe_basis() {
  std::vector<MonomialSpec> basis;
  basis.push_back(basis_monomial("one", 1));
  basis.push_back(basis_monomial("one", 2));
  basis.push_back(basis_monomial("r12", 2));
  basis.push_back(basis_monomial("r12sq", 2));
  basis.push_back(basis_monomial("expnegsum", 2));
  basis.push_back(basis_monomial("bump:1:0.5", 2));
  basis.push_back(basis_monomial("bump:2:0.5", 2));
  basis.push_back(basis_monomial("bump:3:1", 2));
  basis.push_back(basis_monomial("one", 3));
  basis.push_back(basis_monomial("r12", 3));
  basis.push_back(basis_monomial("prod12x13", 3));
  basis.push_back(basis_monomial("expnegsum", 3));
  return basis;
}

}  // namespace umcalc

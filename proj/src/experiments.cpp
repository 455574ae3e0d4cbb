#include "umcalc/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "umcalc/dendrogram.hpp"
#include "umcalc/distance_matrix.hpp"
#include "umcalc/marked.hpp"
#include "umcalc/polynomials.hpp"
#include "umcalc/random_forests.hpp"
#include "umcalc/rng.hpp"
#include "umcalc/semigroup.hpp"

namespace umcalc {

namespace {

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(Clock::now() - start_).count();
  }

 private:
  using Clock = std::chrono::steady_clock;
  Clock::time_point start_ = Clock::now();
};

std::string fmt(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", value);
  return std::string(buf);
}

double ipow(double base, std::size_t exponent) {
  double out = 1.0;
  for (std::size_t i = 0; i < exponent; ++i) {
    out *= base;
  }
  return out;
}

std::uint64_t sub_seed(const SuiteOptions& options, std::string_view label) {
  return derive_seed(options.seed, stream_id(label));
}

ExperimentReport make_report(const SuiteOptions& options, const std::string& name,
                             const std::string& config, unsigned workers) {
  ExperimentReport report;
  report.name = name;
  report.config = config;
  report.seed = options.seed;
  report.workers = workers;
  return report;
}

// Random corpus spaces use dyadic masses (eighths) and heights on the 1/64
// grid. Sums and products of any subset of these values are exact in double
// arithmetic, so the algebraic identities below can be asserted with zero
// tolerance.
double dyadic_mass(CounterRng& rng) {
  return static_cast<double>(1 + rng.next_u64() % 8) / 8.0;
}

Dendrogram random_space(CounterRng& rng, std::size_t max_atoms) {
  const std::size_t n = 1 + static_cast<std::size_t>(rng.next_u64() % max_atoms);
  std::vector<Dendrogram> items;
  items.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    items.push_back(Dendrogram::leaf(dyadic_mass(rng)));
  }
  std::int64_t level = 0;  // height in 1/64 steps, strictly increasing
  while (items.size() > 1) {
    level += static_cast<std::int64_t>(1 + rng.next_u64() % 8);
    std::size_t k = 2 + static_cast<std::size_t>(rng.next_u64() % 3);
    k = std::min(k, items.size());
    std::vector<Dendrogram> group;
    group.reserve(k);
    for (std::size_t j = 0; j < k; ++j) {
      const std::size_t pick = static_cast<std::size_t>(rng.next_u64() % items.size());
      group.push_back(items[pick]);
      items[pick] = items.back();
      items.pop_back();
    }
    items.push_back(Dendrogram::node(Height::of(static_cast<double>(level) / 64.0),
                                     std::move(group)));
  }
  return canonicalize(items.front());
}

Dendrogram random_marked_space(CounterRng& rng, std::size_t max_atoms,
                               std::span<const Mark> marks) {
  const std::size_t n = 1 + static_cast<std::size_t>(rng.next_u64() % max_atoms);
  std::vector<Dendrogram> items;
  items.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    items.push_back(Dendrogram::leaf(dyadic_mass(rng), marks[rng.next_u64() % marks.size()]));
  }
  std::int64_t level = 0;
  while (items.size() > 1) {
    level += static_cast<std::int64_t>(1 + rng.next_u64() % 8);
    std::size_t k = 2 + static_cast<std::size_t>(rng.next_u64() % 3);
    k = std::min(k, items.size());
    std::vector<Dendrogram> group;
    group.reserve(k);
    for (std::size_t j = 0; j < k; ++j) {
      const std::size_t pick = static_cast<std::size_t>(rng.next_u64() % items.size());
      group.push_back(items[pick]);
      items[pick] = items.back();
      items.pop_back();
    }
    items.push_back(Dendrogram::node(Height::of(static_cast<double>(level) / 64.0),
                                     std::move(group)));
  }
  return canonicalize(items.front());
}

// Dyadic fractions of the diameter (or of 1 for single atoms), covering
// depths below, at, and above the prime-splitting range.
std::vector<Height> corpus_depths(const Dendrogram& d) {
  const double base = std::max(d.diameter().value(), 1.0);
  std::vector<Height> out;
  for (const double frac : {0.0625, 0.125, 0.25, 0.5, 0.75}) {
    out.push_back(Height::of(base * frac));
  }
  return out;
}

std::vector<std::string> prime_keys(const std::vector<Dendrogram>& primes) {
  std::vector<std::string> keys;
  keys.reserve(primes.size());
  for (const Dendrogram& p : primes) {
    keys.push_back(encode(p).bytes);
  }
  std::sort(keys.begin(), keys.end());
  return keys;
}

std::vector<std::string> marked_prime_keys(const std::vector<MarkedDendrogram>& primes) {
  std::vector<std::string> keys;
  keys.reserve(primes.size());
  for (const MarkedDendrogram& p : primes) {
    keys.push_back(encode(p.tree).bytes);
  }
  std::sort(keys.begin(), keys.end());
  return keys;
}

// Welford accumulator with exact merge, for worker-split Monte Carlo.
struct RunningStat {
  std::uint64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++count;
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
  }
  void merge(const RunningStat& o) {
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
  double std_error() const {
    if (count < 2) {
      return 0.0;
    }
    return std::sqrt(m2 / static_cast<double>(count - 1) / static_cast<double>(count));
  }
};

// Runs fn(sample index) over [0, samples) split across workers and merges
// the per-sample statistic vectors; deterministic for fixed (seed, workers).
std::vector<RunningStat> parallel_stats(
    std::uint64_t samples, unsigned workers, std::size_t stats,
    const std::function<void(std::uint64_t, std::vector<double>&)>& fn) {
  workers = std::max(1u, std::min<unsigned>(
                             workers, static_cast<unsigned>(std::min<std::uint64_t>(samples, 64))));
  std::vector<std::vector<RunningStat>> parts(workers, std::vector<RunningStat>(stats));
  auto run_range = [&](unsigned w, std::uint64_t lo, std::uint64_t hi) {
    std::vector<double> values(stats);
    for (std::uint64_t i = lo; i < hi; ++i) {
      fn(i, values);
      for (std::size_t s = 0; s < stats; ++s) {
        parts[w][s].add(values[s]);
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
  std::vector<RunningStat> out(stats);
  for (unsigned w = 0; w < workers; ++w) {
    for (std::size_t s = 0; s < stats; ++s) {
      out[s].merge(parts[w][s]);
    }
  }
  return out;
}

PolynomialSpec wrap(const MonomialSpec& m) {
  PolynomialSpec spec;
  spec.terms.push_back(m);
  spec.name = m.name;
  return spec;
}

// The test polynomials shared by the compound Poisson experiments: total
// mass, the pair-distance sum, and a bounded smooth functional, all
// truncated at the model depth.
std::vector<PolynomialSpec> cpf_specs(Height h) {
  return {
      wrap(basis_monomial("one", 1).with_depth(h)),
      wrap(basis_monomial("r12", 2).with_depth(h)),
      wrap(basis_monomial("expnegsum", 2).with_depth(h)),
  };
}

// Monte Carlo -log Laplace rows against the exact closed form, plus the
// null-probability identity, for one model.
void lk_append(ExperimentReport& report, const LevyModel& model, std::uint64_t samples,
               const SuiteOptions& options) {
  const double theta = model.theta();
  int row = 0;
  for (const PolynomialSpec& spec : cpf_specs(model.depth())) {
    const double oracle = cpf_log_laplace_exact(model, spec, model.depth());
    const McEstimate est = laplace_estimate(
        [&model](std::uint64_t s) { return sample_cpf(model, s); }, spec, samples,
        sub_seed(options, "lk." + fmt(theta) + ".row." + std::to_string(row)),
        options.workers);
    report.add_stat("-log L(" + spec.name + "), theta = " + fmt(theta),
                    -std::log(est.value), est.std_error / est.value, oracle,
                    options.sigma);
    ++row;
  }
  // Null-probability identity: the total weight of the jump law equals
  // -log P(sample empty).
  std::uint64_t nulls = 0;
  const std::uint64_t null_seed = sub_seed(options, "lk.null." + fmt(theta));
  for (std::uint64_t i = 0; i < samples; ++i) {
    if (sample_cpf(model, derive_seed(null_seed, i)).is_null()) {
      ++nulls;
    }
  }
  const double p = static_cast<double>(nulls) / static_cast<double>(samples);
  const double se_p = std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
  report.add_stat("-log P(null sample), theta = " + fmt(theta), -std::log(p), se_p / p,
                  theta, options.sigma);
}

bool levy_models_equal(const LevyModel& a, const LevyModel& b);

// Exact depth-consistency rows for the jump-law pushforward.
void pushforward_append(ExperimentReport& report, const LevyModel& model) {
  const LevyModel direct = cpf_levy_at_depth(model, Height::of(0.6));
  const LevyModel via =
      cpf_levy_at_depth(cpf_levy_at_depth(model, Height::of(0.8)), Height::of(0.6));
  report.add_exact("jump-law pushforward composes across depths",
                   levy_models_equal(direct, via),
                   "two jumps merge at depth 0.6; atoms remaining: " +
                       std::to_string(direct.atoms().size()));
  report.add_exact("pushforward at the model depth is the canonical merge",
                   levy_models_equal(cpf_levy_at_depth(model, model.depth()), model));
}

// n-th root comparison rows: exact root structure, then the law of n
// concatenated root draws against the direct law.
void root_append(ExperimentReport& report, const LevyModel& model, unsigned n_roots,
                 std::uint64_t samples, const SuiteOptions& options) {
  const Height t = model.depth();
  const LevyModel root = nth_root_cpf(model, n_roots);
  report.add_exact("n-th root keeps the jump law and divides the intensity",
                   root.theta() == model.theta() / static_cast<double>(n_roots) &&
                       levy_models_equal(
                           LevyModel(model.theta(), model.depth(), root.atoms()), model));
  int row = 0;
  for (const PolynomialSpec& spec : cpf_specs(t)) {
    const McEstimate direct = laplace_estimate(
        [&model](std::uint64_t s) { return sample_cpf(model, s); }, spec, samples,
        sub_seed(options, "root.direct." + std::to_string(row)), options.workers);
    const McEstimate rebuilt = laplace_estimate(
        [&root, t, n_roots](std::uint64_t s) {
          std::vector<Dendrogram> draws;
          draws.reserve(n_roots);
          for (std::uint64_t j = 0; j < n_roots; ++j) {
            draws.push_back(sample_cpf(root, derive_seed(s, j)));
          }
          return concat(t, draws);
        },
        spec, samples, sub_seed(options, "root.rebuilt." + std::to_string(row)),
        options.workers);
    const double se = std::hypot(direct.std_error, rebuilt.std_error);
    report.add_stat("L(" + spec.name + "): " + std::to_string(n_roots) +
                        " roots vs direct",
                    rebuilt.value, se, direct.value, options.sigma,
                    "direct se " + fmt(direct.std_error));
    ++row;
  }
}

// Excursion-approximant rows: n(1 - E exp(-Phi)) under the n-th root vs the
// exact jump integral, with a finite-n bias budget of 2/n relative.
void excursion_append(ExperimentReport& report, const LevyModel& model, std::uint64_t n,
                      std::uint64_t samples, const SuiteOptions& options) {
  const Height h = model.depth();
  int row = 0;
  for (const PolynomialSpec& spec : cpf_specs(h)) {
    const double oracle = cpf_log_laplace_exact(model, spec, h);
    const McEstimate est = estimate_levy_functional(
        model, n, spec, h, samples,
        sub_seed(options, "excursion." + std::to_string(row)), options.workers);
    const double tolerance =
        std::max(options.sigma * est.std_error, 2.0 / static_cast<double>(n) * oracle);
    ReportRow r;
    r.statistic = "n(1 - E exp(-" + spec.name + ")) under the " + std::to_string(n) +
                  "th root";
    r.estimate = est.value;
    r.std_error = est.std_error;
    r.oracle = oracle;
    r.z = est.std_error > 0 ? (est.value - oracle) / est.std_error : 0.0;
    r.pass = std::abs(est.value - oracle) <= tolerance;
    r.note = "allowed |error| " + fmt(tolerance) + " (sigma band or 2/n relative)";
    report.rows.push_back(std::move(r));
    ++row;
  }
}

// Two-atom real-valued jump measure for the star-forest experiment.
RealLevySpec demo_real_levy() {
  RealLevySpec nu;
  nu.atoms = {{0.5, 1.2}, {2.0, 0.7}};
  return nu;
}

void star_append(ExperimentReport& report, const RealLevySpec& nu, std::uint64_t samples,
                 const SuiteOptions& options) {
  const Height h = Height::of(1.0);
  int row = 0;
  for (const double s : {0.5, 1.0, 2.0}) {
    MonomialSpec mass;
    mass.order = 1;
    mass.phi = [s](const DistanceMatrix&) { return s; };
    mass.name = "mass*" + fmt(s);
    const McEstimate est = laplace_estimate(
        [&nu, h](std::uint64_t sd) { return star_forest_from_levy(h, nu, sd); },
        wrap(mass), samples, sub_seed(options, "star." + std::to_string(row)),
        options.workers);
    report.add_stat("-log E exp(-" + fmt(s) + " * mass)", -std::log(est.value),
                    est.std_error / est.value, nu.log_laplace(s), options.sigma);
    ++row;
  }
}

// Branching-property rows: a critical binary run from a concatenation
// against the convolution of the independently run parts.
void branching_append(ExperimentReport& report, std::uint64_t samples,
                      const SuiteOptions& options) {
  const Height h = Height::of(0.5);
  const double time = 0.3;
  const double rate = 1.0;
  const double atom_mass = 0.25;
  const Height depth_after = Height::of(0.8);  // h + time
  const Dendrogram u =
      Dendrogram::node(Height::of(0.5), {Dendrogram::leaf(0.5), Dendrogram::leaf(0.5)});
  const Dendrogram v = Dendrogram::leaf(1.0);
  const Dendrogram joined = concat(h, {u, v});

  auto evolve_joined = [&](std::uint64_t s) {
    return gw_evolve(joined, time, rate, atom_mass, s);
  };
  auto evolve_u = [&](std::uint64_t s) { return gw_evolve(u, time, rate, atom_mass, s); };
  auto evolve_v = [&](std::uint64_t s) { return gw_evolve(v, time, rate, atom_mass, s); };
  auto convolved = [&](std::uint64_t s) {
    return branching_convolution_sample(evolve_u, evolve_v, depth_after, s);
  };

  {
    bool depth_ok = true;
    for (std::uint64_t i = 0; i < 100; ++i) {
      const Dendrogram sample = evolve_joined(derive_seed(sub_seed(options, "gwb.depth"), i));
      depth_ok = depth_ok && !(sample.diameter() > depth_after.doubled());
    }
    report.add_exact("evolved samples live at depth h + t", depth_ok, "100 draws");
  }

  // The functional depth strictly exceeds h + t so that tuples mixing the
  // two parts (cross distance exactly 2(h + t)) are kept, making the
  // comparison sensitive to the joint structure, not only to the marginals.
  const Height spec_depth = Height::of(1.0);
  const std::vector<PolynomialSpec> specs = {
      wrap(basis_monomial("r12", 2).with_depth(spec_depth)),
      wrap(basis_monomial("expnegsum", 2).with_depth(spec_depth)),
      wrap(basis_monomial("prod12x13", 3).with_depth(spec_depth)),
  };
  int row = 0;
  for (const PolynomialSpec& spec : specs) {
    const McEstimate whole = laplace_estimate(
        evolve_joined, spec, samples, sub_seed(options, "gwb.whole." + std::to_string(row)),
        options.workers);
    const McEstimate parts = laplace_estimate(
        convolved, spec, samples, sub_seed(options, "gwb.parts." + std::to_string(row)),
        options.workers);
    const double se = std::hypot(whole.std_error, parts.std_error);
    report.add_stat("L(" + spec.name + "): joined run vs convolution of part runs",
                    parts.value, se, whole.value, options.sigma,
                    "joined se " + fmt(whole.std_error));
    ++row;
  }
}

bool levy_models_equal(const LevyModel& a, const LevyModel& b) {
  if (a.theta() != b.theta() || a.depth() != b.depth() ||
      a.atoms().size() != b.atoms().size()) {
    return false;
  }
  auto key = [](const LevyModel& m) {
    std::vector<std::pair<std::string, double>> out;
    for (const LevyAtom& atom : m.atoms()) {
      out.emplace_back(encode(atom.tree).bytes, atom.weight);
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  return key(a) == key(b);
}

}  // namespace

LevyModel demo_jump_law(double theta) {
  std::vector<LevyAtom> atoms;
  atoms.push_back({0.5, Dendrogram::node(Height::of(1.5),
                                         {Dendrogram::leaf(0.5), Dendrogram::leaf(1.0)})});
  atoms.push_back({0.5, Dendrogram::node(Height::of(1.3),
                                         {Dendrogram::leaf(0.5), Dendrogram::leaf(1.0)})});
  return LevyModel(theta, Height::of(1.0), std::move(atoms));
}

ExperimentReport run_factorization_round_trip(const SuiteOptions& options) {
  Timer timer;
  ExperimentReport report = make_report(options, "factorization-round-trip",
                                        "1000 spaces (<=50 atoms), 5 depths each", 1);
  CounterRng rng(options.seed, "suite.factorization");
  std::size_t checks = 0;
  std::size_t rebuild_failures = 0;
  std::size_t prime_failures = 0;
  for (int i = 0; i < 1000; ++i) {
    const Dendrogram d = random_space(rng, 50);
    for (const Height h : corpus_depths(d)) {
      const ForestDecomposition dec = decompose(h, d);
      const Dendrogram rebuilt = concat(h, dec.primes);
      const Dendrogram expected = truncate(h, d);
      ++checks;
      if (!(encode(rebuilt) == encode(expected))) {
        ++rebuild_failures;
      }
      for (const Dendrogram& p : dec.primes) {
        if (p.is_null() || !(p.diameter() < h.doubled())) {
          ++prime_failures;
        }
      }
    }
  }
  report.add_exact("concat(h, primes) reproduces truncate(h, d)", rebuild_failures == 0,
                   std::to_string(checks) + " exact canonical comparisons");
  report.add_exact("primes nonnull with diameter strictly below 2h", prime_failures == 0);
  report.wall_seconds = timer.seconds();
  return report;
}

ExperimentReport run_truncation_consistency(const SuiteOptions& options) {
  Timer timer;
  ExperimentReport report = make_report(options, "truncation-consistency",
                                        "1000 spaces (<=50 atoms), 3 depth pairs each", 1);
  CounterRng rng(options.seed, "suite.truncation");
  std::size_t checks = 0;
  std::size_t failures = 0;
  const std::pair<double, double> fracs[] = {{0.125, 0.25}, {0.25, 0.5}, {0.1875, 0.75}};
  for (int i = 0; i < 1000; ++i) {
    const Dendrogram d = random_space(rng, 50);
    const double base = std::max(d.diameter().value(), 1.0);
    for (const auto& [lo, hi] : fracs) {
      const Height h_low = Height::of(base * lo);
      const Height h_high = Height::of(base * hi);
      const std::vector<std::string> direct = prime_keys(decompose(h_low, d).primes);
      std::vector<Dendrogram> refined;
      for (const Dendrogram& p : decompose(h_high, d).primes) {
        for (Dendrogram& q : decompose(h_low, p).primes) {
          refined.push_back(std::move(q));
        }
      }
      ++checks;
      if (direct != prime_keys(refined)) {
        ++failures;
      }
    }
  }
  report.add_exact("primes at h' equal truncate-and-refactor of the h-primes", failures == 0,
                   std::to_string(checks) + " exact multiset comparisons");
  report.wall_seconds = timer.seconds();
  return report;
}

ExperimentReport run_truncated_homomorphism(const SuiteOptions& options) {
  Timer timer;
  ExperimentReport report = make_report(options, "truncated-homomorphism",
                                        "500 pairs (<=8 atoms each), 12-spec probe basis", 1);
  CounterRng rng(options.seed, "suite.homomorphism");
  const std::vector<MonomialSpec> basis = probe_basis();
  const double fracs[] = {0.375, 0.5, 0.75};
  double max_err = 0.0;
  std::size_t checks = 0;
  for (int i = 0; i < 500; ++i) {
    const Dendrogram raw_u = random_space(rng, 8);
    const Dendrogram raw_v = random_space(rng, 8);
    const double base =
        std::max({raw_u.diameter().value(), raw_v.diameter().value(), 1.0});
    const Height h = Height::of(base * fracs[i % 3]);
    const Dendrogram u = truncate(h, raw_u);
    const Dendrogram v = truncate(h, raw_v);
    const Dendrogram joined = concat(h, {u, v});
    for (const MonomialSpec& probe : basis) {
      const MonomialSpec spec = probe.with_depth(h);
      const double lhs = eval_monomial(spec, joined);
      const double rhs = eval_monomial(spec, u) + eval_monomial(spec, v);
      max_err = std::max(max_err, std::abs(lhs - rhs));
      ++checks;
    }
  }
  report.add_exact("Phi_h(u ^ v) = Phi_h(u) + Phi_h(v) within 1e-10", max_err <= 1e-10,
                   std::to_string(checks) + " evaluations, max |error| = " + fmt(max_err));
  report.wall_seconds = timer.seconds();
  return report;
}

ExperimentReport run_pair_measure_concat_identity(const SuiteOptions& options) {
  Timer timer;
  ExperimentReport report = make_report(options, "pair-measure-concat-identity",
                                        "500 pairs (<=12 atoms each)", 1);
  CounterRng rng(options.seed, "suite.pairmeasure");
  const double fracs[] = {0.375, 0.5, 0.75};
  std::size_t checks = 0;
  std::size_t failures = 0;
  for (int i = 0; i < 500; ++i) {
    const Dendrogram raw_u = random_space(rng, 12);
    const Dendrogram raw_v = random_space(rng, 12);
    const double base =
        std::max({raw_u.diameter().value(), raw_v.diameter().value(), 1.0});
    const Height h = Height::of(base * fracs[i % 3]);
    const Dendrogram u = truncate(h, raw_u);
    const Dendrogram v = truncate(h, raw_v);
    const DistanceMatrixMeasure lhs = distance_matrix_measure(2, concat(h, {u, v}));
    DistanceMatrixMeasure rhs = distance_matrix_measure(2, u);
    rhs.add_measure(distance_matrix_measure(2, v));
    DistanceMatrix cross(2);
    cross.set(0, 1, h.doubled());
    rhs.add(cross, 2.0 * u.total_mass() * v.total_mass());
    ++checks;
    if (!(lhs == rhs)) {
      ++failures;
    }
  }
  report.add_exact("pair measure of u ^ v = parts plus 2*mass(u)*mass(v) at 2h",
                   failures == 0, std::to_string(checks) + " exact measure comparisons");
  report.wall_seconds = timer.seconds();
  return report;
}

ExperimentReport run_ball_count_additivity(const SuiteOptions& options) {
  Timer timer;
  // Exhaustive corpus: every canonical space with node heights in {1, 2} and
  // integer leaf masses summing to at most 6 (all spaces of at most six unit
  // atoms on that grid, with zero-distance atoms merged).
  std::vector<std::vector<int>> parts_of[7];
  for (int m = 1; m <= 6; ++m) {
    std::vector<int> cur;
    const std::function<void(int, int)> rec = [&](int remaining, int max_part) {
      if (remaining == 0) {
        parts_of[m].push_back(cur);
        return;
      }
      for (int p = std::min(remaining, max_part); p >= 1; --p) {
        cur.push_back(p);
        rec(remaining - p, p);
        cur.pop_back();
      }
    };
    rec(m, m);
  }

  std::vector<std::vector<Dendrogram>> shallow(7);  // heights within {1}
  for (int m = 1; m <= 6; ++m) {
    shallow[m].push_back(Dendrogram::leaf(static_cast<double>(m)));
    for (const std::vector<int>& parts : parts_of[m]) {
      if (parts.size() < 2) {
        continue;
      }
      std::vector<Dendrogram> leaves;
      for (int p : parts) {
        leaves.push_back(Dendrogram::leaf(static_cast<double>(p)));
      }
      shallow[m].push_back(Dendrogram::node(Height::of(1.0), std::move(leaves)));
    }
  }
  std::vector<Dendrogram> corpus;
  std::set<std::string> seen;
  auto add_space = [&](const Dendrogram& d) {
    const Dendrogram canon = canonicalize(d);
    if (seen.insert(encode(canon).bytes).second) {
      corpus.push_back(canon);
    }
  };
  for (int m = 1; m <= 6; ++m) {
    for (const Dendrogram& d : shallow[m]) {
      add_space(d);
    }
    for (const std::vector<int>& parts : parts_of[m]) {
      if (parts.size() < 2) {
        continue;
      }
      std::vector<std::size_t> choice(parts.size(), 0);
      while (true) {
        std::vector<Dendrogram> children;
        for (std::size_t i = 0; i < parts.size(); ++i) {
          children.push_back(shallow[parts[i]][choice[i]]);
        }
        add_space(Dendrogram::node(Height::of(2.0), std::move(children)));
        std::size_t cursor = 0;
        while (cursor < parts.size() && ++choice[cursor] == shallow[parts[cursor]].size()) {
          choice[cursor] = 0;
          ++cursor;
        }
        if (cursor == parts.size()) {
          break;
        }
      }
    }
  }

  ExperimentReport report =
      make_report(options, "ball-count-additivity",
                  std::to_string(corpus.size()) + " exhaustive spaces, 5-depth grid", 1);
  const double grid[] = {0.25, 0.5, 0.75, 1.0, 1.25};
  std::size_t sup_checks = 0;
  std::size_t sup_failures = 0;
  std::size_t size_failures = 0;
  for (const Dendrogram& u : corpus) {
    const std::size_t atom_count = u.atom_count();
    std::vector<DistanceMatrixMeasure> measures;
    measures.reserve(atom_count);
    for (std::size_t m = 1; m <= atom_count; ++m) {
      measures.push_back(distance_matrix_measure(m, u));
    }
    for (const double hv : grid) {
      const Height h = Height::of(hv);
      const BallCount count = count_balls(h, u);
      std::uint64_t sup = 0;
      for (std::size_t m = 1; m <= atom_count; ++m) {
        if (measures[m - 1].weight_all_entries_at_least(h.doubled()) > 0) {
          sup = m;
        }
      }
      ++sup_checks;
      if (count.infinite || count.value != sup) {
        ++sup_failures;
      }
      if (count.value != decompose(h, u).primes.size()) {
        ++size_failures;
      }
    }
  }
  std::size_t add_checks = 0;
  std::size_t add_failures = 0;
  for (std::size_t i = 0; i + 1 < corpus.size(); ++i) {
    for (const double hv : {1.0, 1.25, 2.0}) {
      const Height h = Height::of(hv);
      const Dendrogram joined = concat(h, {corpus[i], corpus[i + 1]});
      ++add_checks;
      if (count_balls(h, joined).value !=
          count_balls(h, corpus[i]).value + count_balls(h, corpus[i + 1]).value) {
        ++add_failures;
      }
    }
  }
  report.add_exact("ball count equals the largest order charging all entries >= 2h",
                   sup_failures == 0, std::to_string(sup_checks) + " space/depth checks");
  report.add_exact("ball count equals the prime multiplicity", size_failures == 0);
  report.add_exact("ball count adds over concatenation", add_failures == 0,
                   std::to_string(add_checks) + " pair/depth checks");
  report.wall_seconds = timer.seconds();
  return report;
}

ExperimentReport run_power_sum_dual(const SuiteOptions& options) {
  Timer timer;
  ExperimentReport report = make_report(options, "power-sum-dual",
                                        "200 spaces (<=8 atoms), exponents 1..3", 1);
  CounterRng rng(options.seed, "suite.powersum");
  MonomialSpec base;
  base.order = 1;
  base.phi = [](const DistanceMatrix&) { return 0.75; };
  base.name = "const-3/4@1";
  base.sup_bound = 0.75;
  double max_err = 0.0;
  std::size_t checks = 0;
  for (int i = 0; i < 200; ++i) {
    const Dendrogram d = random_space(rng, 8);
    const double basev = std::max(d.diameter().value(), 1.0);
    const Height h = Height::of(basev * (i % 2 == 0 ? 0.25 : 0.5));
    const MonomialSpec spec = base.with_depth(h);
    for (std::size_t n = 1; n <= 3; ++n) {
      const PowerSumResult result = power_sum_monomial(spec, n, d);
      max_err = std::max(max_err,
                         std::abs(result.via_decomposition - result.via_lifted));
      ++checks;
    }
  }
  report.add_exact("prime-side power sum equals the lifted monomial within 1e-10",
                   max_err <= 1e-10,
                   std::to_string(checks) + " evaluations, max |error| = " + fmt(max_err));
  report.wall_seconds = timer.seconds();
  return report;
}

ExperimentReport run_levy_khintchine_cpf(const SuiteOptions& options) {
  Timer timer;
  ExperimentReport report =
      make_report(options, "levy-khintchine-cpf",
                  "theta in {0.5, 2}, two-atom jump law, N = 100000 per statistic",
                  options.workers);
  for (const double theta : {0.5, 2.0}) {
    lk_append(report, demo_jump_law(theta), 100000, options);
  }
  pushforward_append(report, demo_jump_law(2.0));
  report.wall_seconds = timer.seconds();
  return report;
}

ExperimentReport run_root_concatenation(const SuiteOptions& options) {
  Timer timer;
  ExperimentReport report = make_report(
      options, "root-concatenation", "theta = 2, n = 4 roots, N = 100000 per side",
      options.workers);
  root_append(report, demo_jump_law(2.0), 4, 100000, options);
  report.wall_seconds = timer.seconds();
  return report;
}

ExperimentReport run_excursion_approximant(const SuiteOptions& options) {
  Timer timer;
  ExperimentReport report = make_report(options, "excursion-approximant",
                                        "theta = 2, n = 64, N = 100000", options.workers);
  excursion_append(report, demo_jump_law(2.0), 64, 100000, options);
  report.wall_seconds = timer.seconds();
  return report;
}

ExperimentReport run_star_mass_infdiv(const SuiteOptions& options) {
  Timer timer;
  ExperimentReport report = make_report(options, "star-mass-infdiv",
                                        "two-atom jump measure, N = 100000 per s",
                                        options.workers);
  star_append(report, demo_real_levy(), 100000, options);
  report.wall_seconds = timer.seconds();
  return report;
}

namespace {

// Fixed 20-atom spaces with dyadic masses and dyadic height ladders, used by
// the trunk threshold experiment.
Dendrogram trunk_test_space(int variant) {
  int counter = 0;
  auto leaf = [&counter]() {
    return Dendrogram::leaf(static_cast<double>(1 + counter++ % 8) / 8.0);
  };
  const double unit = variant == 0 ? 1.0 : 0.75;
  auto H = [unit](double v) { return Height::of(v * unit); };
  // heights {0.5, 1, 2, 4, 8} * unit
  const Dendrogram a = Dendrogram::node(
      H(2), {Dendrogram::node(H(1), {Dendrogram::node(H(0.5), {leaf(), leaf()}),
                                     Dendrogram::node(H(0.5), {leaf(), leaf()})}),
             Dendrogram::node(H(1), {Dendrogram::node(H(0.5), {leaf(), leaf()}),
                                     Dendrogram::node(H(0.5), {leaf(), leaf()})})});
  const Dendrogram b = Dendrogram::node(
      H(2), {Dendrogram::node(H(1), {Dendrogram::node(H(0.5), {leaf(), leaf()}), leaf()}),
             Dendrogram::node(H(0.5), {leaf(), leaf(), leaf()}), leaf()});
  const Dendrogram c = Dendrogram::node(H(4), {a, b});
  const Dendrogram d = Dendrogram::node(
      H(8), {c,
             Dendrogram::node(H(1), {Dendrogram::node(H(0.5), {leaf(), leaf()}),
                                     Dendrogram::node(H(0.5), {leaf(), leaf()})}),
             leaf()});
  return canonicalize(d);
}

void collect_heights(const Dendrogram& d, std::set<Height>* out) {
  if (!d.is_node()) {
    return;
  }
  out->insert(d.root_height());
  for (const Dendrogram& c : d.children()) {
    collect_heights(c, out);
  }
}

}  // namespace

ExperimentReport run_trunk_threshold(const SuiteOptions& options) {
  Timer timer;
  ExperimentReport report = make_report(options, "trunk-threshold",
                                        "two fixed 20-atom spaces, h = diam/2^k, k = 1..10",
                                        1);
  std::size_t stable_checks = 0;
  std::size_t stable_failures = 0;
  std::size_t moving_checks = 0;
  std::size_t moving_failures = 0;
  for (int variant = 0; variant < 2; ++variant) {
    const Dendrogram space = trunk_test_space(variant);
    std::set<Height> height_set;
    collect_heights(space, &height_set);
    const std::vector<Height> attained(height_set.begin(), height_set.end());

    // Threshold test functions: step cutoffs at zero and at every attained
    // distance except the diameter. Their values only move when a shifted
    // distance crosses a cutoff, so the trunk evaluation stabilizes exactly
    // once 2h drops below the smallest distance-to-cutoff gap.
    std::vector<double> cutoffs = {0.0};
    for (std::size_t i = 0; i + 1 < attained.size(); ++i) {
      cutoffs.push_back(attained[i].value());
    }
    std::vector<MonomialSpec> specs;
    {
      MonomialSpec order2;
      order2.order = 2;
      order2.name = "step-sum@2";
      order2.phi = [cutoffs](const DistanceMatrix& m) {
        double value = 0.0;
        for (const double c : cutoffs) {
          value += m.r(0, 1) > c ? 1.0 : 0.0;
        }
        return value;
      };
      order2.sup_bound = static_cast<double>(cutoffs.size());
      specs.push_back(std::move(order2));

      MonomialSpec order3;
      order3.order = 3;
      order3.name = "step-sum@3";
      const double c12 = 0.0;
      const double c13 = cutoffs.size() > 1 ? cutoffs[1] : 0.0;
      const double c23 = cutoffs.back();
      order3.phi = [c12, c13, c23](const DistanceMatrix& m) {
        return (m.r(0, 1) > c12 ? 1.0 : 0.0) + (m.r(0, 2) > c13 ? 1.0 : 0.0) +
               (m.r(1, 2) > c23 ? 1.0 : 0.0);
      };
      order3.sup_bound = 3.0;
      specs.push_back(std::move(order3));
    }

    // Smallest gap between an attained distance and a lower cutoff.
    double threshold = attained.back().value();
    for (const Height dist : attained) {
      for (const double c : cutoffs) {
        if (dist.value() > c) {
          threshold = std::min(threshold, dist.value() - c);
        }
      }
    }

    const Height diam = space.diameter();
    for (const MonomialSpec& spec : specs) {
      const double whole = eval_monomial(spec, space);
      for (int k = 1; k <= 10; ++k) {
        const Height h = Height::from_units(diam.units() >> k);
        const double delta = std::abs(eval_monomial(spec, trunk(h, space)) - whole);
        if (h.doubled().value() < threshold) {
          ++stable_checks;
          if (delta != 0.0) {
            ++stable_failures;
          }
        } else {
          ++moving_checks;
          if (delta <= 0.0) {
            ++moving_failures;
          }
        }
      }
    }
  }
  report.add_exact("trunk evaluation is exact once 2h < the smallest gap",
                   stable_checks > 0 && stable_failures == 0,
                   std::to_string(stable_checks) + " stable-regime checks");
  report.add_exact("trunk evaluation strictly moves before the threshold",
                   moving_checks > 0 && moving_failures == 0,
                   std::to_string(moving_checks) + " moving-regime checks");
  report.wall_seconds = timer.seconds();
  return report;
}

ExperimentReport run_generator_closed_form(const SuiteOptions& options) {
  Timer timer;
  ExperimentReport report = make_report(
      options, "generator-closed-form",
      "100 spaces (<=8 atoms), orders 1..4; drift-rate run K = 200, dt = 0.01",
      options.workers);
  CounterRng rng(options.seed, "suite.generator");
  double max_err = 0.0;
  std::size_t checks = 0;
  for (int i = 0; i < 100; ++i) {
    const Dendrogram d = random_space(rng, 8);
    const double total = d.total_mass();
    const double a = static_cast<double>(static_cast<int>(rng.next_u64() % 5) - 2) / 2.0;
    const double b = static_cast<double>(rng.next_u64() % 4) / 2.0;
    for (std::size_t n = 1; n <= 4; ++n) {
      const double got = generator_apply(basis_monomial("one", n), d, a, b);
      const double want = a * static_cast<double>(n) * ipow(total, n) +
                          b / 2.0 * static_cast<double>(n) * static_cast<double>(n - 1) *
                              ipow(total, n - 1);
      max_err = std::max(max_err, std::abs(got - want));
      ++checks;
    }
  }
  report.add_exact(
      "generator on constant test functions matches a*n*mass^n + b/2*n(n-1)*mass^(n-1)",
      max_err <= 1e-10, std::to_string(checks) + " evaluations, max |error| = " + fmt(max_err));

  // Finite-population drift-rate check: a critical binary run over a short
  // window against the generator with drift 0 and branching coefficient
  // rate * atom mass (the per-mass variance flux of the critical binary
  // offspring law). For total-mass monomials of order <= 2 the expected
  // increment is linear in time, so the window adds no discretization bias.
  const std::uint64_t population = 200;
  const GwConfig cfg{population, static_cast<double>(population), 0.01,
                     1.0 / static_cast<double>(population)};
  const double b_cal = cfg.rate * cfg.atom_mass;
  const Dendrogram start = Dendrogram::leaf(1.0);
  const std::uint64_t paths = 20000;
  const std::uint64_t gw_seed = sub_seed(options, "generator.gw");
  const std::vector<RunningStat> stats = parallel_stats(
      paths, options.workers, 2, [&](std::uint64_t i, std::vector<double>& values) {
        const double mass = gw_genealogy(cfg, derive_seed(gw_seed, i)).total_mass();
        values[0] = mass;
        values[1] = mass * mass;
      });
  const char* labels[] = {"mass", "mass^2"};
  for (std::size_t n = 1; n <= 2; ++n) {
    const MonomialSpec spec = basis_monomial("one", n);
    const double at_start = eval_monomial(spec, start);
    const double oracle = generator_apply(spec, start, 0.0, b_cal);
    const double estimate = (stats[n - 1].mean - at_start) / cfg.horizon;
    const double se = stats[n - 1].std_error() / cfg.horizon;
    const double z = (estimate - oracle) / se;
    ReportRow row;
    row.statistic = std::string("drift rate of ") + labels[n - 1] + " over dt";
    row.estimate = estimate;
    row.std_error = se;
    row.oracle = oracle;
    row.z = z;
    row.pass = std::abs(z) <= 5.0;  // soft band: warn in (4, 5], fail beyond
    row.note = "soft bound: pass <= 5 sigma, warn above 4";
    if (std::abs(z) > 4.0 && std::abs(z) <= 5.0) {
      report.warnings.push_back(std::string("drift rate of ") + labels[n - 1] +
                                " landed in the 4-5 sigma band (z = " + fmt(z) + ")");
    }
    report.rows.push_back(std::move(row));
  }
  report.wall_seconds = timer.seconds();
  return report;
}

ExperimentReport run_gw_branching(const SuiteOptions& options) {
  Timer timer;
  ExperimentReport report = make_report(options, "gw-branching",
                                        "u (2 atoms) ^ v (1 atom), N = 50000 per side",
                                        options.workers);
  branching_append(report, 50000, options);
  report.wall_seconds = timer.seconds();
  return report;
}

ExperimentReport run_gw_coupling(const SuiteOptions& options) {
  Timer timer;
  ExperimentReport report = make_report(options, "gw-coupling",
                                        "200 coupled paths, 10 checkpoints", 1);
  const Height h = Height::of(0.5);
  const double horizon = 1.0;
  const double rate = 1.0;
  const double atom_mass = 0.25;
  const Dendrogram u =
      Dendrogram::node(Height::of(0.5), {Dendrogram::leaf(0.5), Dendrogram::leaf(0.5)});
  const Dendrogram extra = Dendrogram::leaf(0.75);

  std::size_t checks = 0;
  std::size_t failures = 0;
  std::size_t strict_checks = 0;
  std::size_t strict_failures = 0;
  std::size_t replay_failures = 0;
  const std::uint64_t base = sub_seed(options, "coupling");
  for (std::uint64_t path = 0; path < 200; ++path) {
    const std::uint64_t seed = derive_seed(base, path);
    // The same seed and per-part stream drive the u-part of both runs, so
    // the smaller run is literally a sub-realization of the larger one.
    const GwHistory hist_u = gw_simulate(u, horizon, rate, atom_mass, seed, "gw.part.0");
    const GwHistory hist_extra =
        gw_simulate(extra, horizon, rate, atom_mass, seed, "gw.part.1");
    for (int j = 1; j <= 10; ++j) {
      const double t = static_cast<double>(j) / 10.0;
      const Height depth = Height::of(0.5 + t);
      const Dendrogram small = gw_snapshot(hist_u, t);
      const Dendrogram big =
          concat(depth, {small, gw_snapshot(hist_extra, t)});
      ++checks;
      if (!is_subforest(depth, small, big)) {
        ++failures;
      }
      if (!gw_snapshot(hist_extra, t).is_null()) {
        ++strict_checks;
        if (is_subforest(depth, big, small)) {
          ++strict_failures;
        }
      }
    }
    if (path < 20) {
      const std::vector<Dendrogram> parts = {u, extra};
      const Dendrogram via_parts =
          gw_evolve_parts(parts, h, horizon, rate, atom_mass, seed);
      const Dendrogram assembled =
          concat(Height::of(0.5 + horizon),
                 {gw_snapshot(hist_u, horizon), gw_snapshot(hist_extra, horizon)});
      if (!(encode(via_parts) == encode(assembled))) {
        ++replay_failures;
      }
    }
  }
  report.add_exact("coupled run from u embeds into the run from u ^ w", failures == 0,
                   std::to_string(checks) + " checkpoint checks");
  report.add_exact("the embedding is strict while the w-part survives",
                   strict_failures == 0, std::to_string(strict_checks) + " checks");
  report.add_exact("part-wise evolution replays the assembled snapshots bitwise",
                   replay_failures == 0, "20 paths");
  report.wall_seconds = timer.seconds();
  return report;
}

ExperimentReport run_marked_suite(const SuiteOptions& options) {
  Timer timer;
  ExperimentReport report = make_report(options, "marked-suite",
                                        "300 marked spaces (<=20 atoms), 3 marks", 1);
  const MarkSpace space = MarkSpace::alphabet({"a", "b", "c"}, "a");
  const std::vector<Mark> marks = {"a", "b", "c"};
  CounterRng rng(options.seed, "suite.marked");
  std::vector<MarkedDendrogram> corpus;
  corpus.reserve(300);
  for (int i = 0; i < 300; ++i) {
    corpus.push_back(marked_make(space, random_marked_space(rng, 20, marks)));
  }

  // Dyadic mark weights keep the weighted monomial sums exact.
  const auto mark_weight = [](const Mark& m) {
    if (m == "a") {
      return 1.0;
    }
    if (m == "b") {
      return 2.0;
    }
    return 0.5;
  };
  const MarkFunction g = [&mark_weight](std::span<const Mark> tuple) {
    double value = 1.0;
    for (const Mark& m : tuple) {
      value *= mark_weight(m);
    }
    return value;
  };

  std::size_t round_checks = 0;
  std::size_t round_failures = 0;
  std::size_t consistency_failures = 0;
  for (const MarkedDendrogram& d : corpus) {
    const double base = std::max(d.tree.diameter().value(), 1.0);
    for (const double frac : {0.25, 0.5, 0.75}) {
      const Height h = Height::of(base * frac);
      const MarkedDecomposition dec = marked_decompose(h, d);
      const MarkedDendrogram rebuilt = marked_concat(h, dec.primes);
      const MarkedDendrogram expected = marked_truncate(h, d);
      ++round_checks;
      if (!(encode(rebuilt.tree) == encode(expected.tree))) {
        ++round_failures;
      }
    }
    const Height h_low = Height::of(base * 0.1875);
    const Height h_high = Height::of(base * 0.5);
    const std::vector<std::string> direct =
        marked_prime_keys(marked_decompose(h_low, d).primes);
    std::vector<MarkedDendrogram> refined;
    for (const MarkedDendrogram& p : marked_decompose(h_high, d).primes) {
      for (MarkedDendrogram& q : marked_decompose(h_low, p).primes) {
        refined.push_back(std::move(q));
      }
    }
    if (direct != marked_prime_keys(refined)) {
      ++consistency_failures;
    }
  }
  report.add_exact("marked factorization round trip", round_failures == 0,
                   std::to_string(round_checks) + " exact comparisons");
  report.add_exact("marked truncation consistency across depths", consistency_failures == 0,
                   std::to_string(corpus.size()) + " exact multiset comparisons");

  double exact_err = 0.0;
  double smooth_err = 0.0;
  std::size_t measure_failures = 0;
  std::size_t conservation_failures = 0;
  const double tol = 1e-12;
  for (std::size_t i = 0; i + 1 < corpus.size(); i += 2) {
    const double base = std::max({corpus[i].tree.diameter().value(),
                                  corpus[i + 1].tree.diameter().value(), 1.0});
    const Height h = Height::of(base * 0.5);
    const MarkedDendrogram mu = marked_truncate(h, corpus[i]);
    const MarkedDendrogram mv = marked_truncate(h, corpus[i + 1]);
    const std::vector<MarkedDendrogram> parts = {mu, mv};
    const MarkedDendrogram joined = marked_concat(h, parts);

    MonomialSpec step;
    step.order = 2;
    step.name = "step@2";
    const double cutoff = h.value();
    step.phi = [cutoff](const DistanceMatrix& m) { return m.r(0, 1) > cutoff ? 1.0 : 0.0; };
    for (const MonomialSpec& probe :
         {basis_monomial("one", 2).with_depth(h), step.with_depth(h)}) {
      const double lhs = marked_monomial_eval(probe, g, joined);
      const double rhs =
          marked_monomial_eval(probe, g, mu) + marked_monomial_eval(probe, g, mv);
      exact_err = std::max(exact_err, std::abs(lhs - rhs));
    }
    {
      const MonomialSpec probe = basis_monomial("r12", 2).with_depth(h);
      const double lhs = marked_monomial_eval(probe, g, joined);
      const double rhs =
          marked_monomial_eval(probe, g, mu) + marked_monomial_eval(probe, g, mv);
      smooth_err = std::max(smooth_err, std::abs(lhs - rhs));
    }

    const DistanceMatrixMeasure lhs_measure =
        distance_matrix_measure(2, project_to_unmarked(joined));
    DistanceMatrixMeasure rhs_measure =
        distance_matrix_measure(2, project_to_unmarked(mu));
    rhs_measure.add_measure(distance_matrix_measure(2, project_to_unmarked(mv)));
    DistanceMatrix cross(2);
    cross.set(0, 1, h.doubled());
    rhs_measure.add(cross, 2.0 * mu.tree.total_mass() * mv.tree.total_mass());
    if (!(lhs_measure == rhs_measure)) {
      ++measure_failures;
    }

    std::map<Mark, double> expected = project_to_mark_measure(mu);
    for (const auto& [mark, mass] : project_to_mark_measure(mv)) {
      expected[mark] += mass;
    }
    const std::map<Mark, double> got = project_to_mark_measure(joined);
    bool conserved = got.size() == expected.size();
    double total = 0.0;
    for (const auto& [mark, mass] : got) {
      const auto it = expected.find(mark);
      conserved = conserved && it != expected.end() && std::abs(it->second - mass) <= tol;
      total += mass;
    }
    conserved = conserved && std::abs(total - joined.tree.total_mass()) <= tol;
    const std::map<Mark, double> after_truncate =
        project_to_mark_measure(marked_truncate(Height::of(base * 0.25), joined));
    conserved = conserved && after_truncate == got;
    if (!conserved) {
      ++conservation_failures;
    }
  }
  report.add_exact("marked monomial additivity (dyadic test functions)", exact_err == 0.0,
                   "max |error| = " + fmt(exact_err));
  report.add_exact("marked monomial additivity (distance-linear) within 1e-10",
                   smooth_err <= 1e-10, "max |error| = " + fmt(smooth_err));
  report.add_exact("pair-measure identity on the genealogy parts", measure_failures == 0);
  report.add_exact("mark measure adds over concatenation and survives truncation",
                   conservation_failures == 0);
  report.wall_seconds = timer.seconds();
  return report;
}

ExperimentReport verify_lk(double theta, std::uint64_t samples,
                           const SuiteOptions& options) {
  Timer timer;
  ExperimentReport report =
      make_report(options, "verify-lk",
                  "theta = " + fmt(theta) + ", N = " + std::to_string(samples),
                  options.workers);
  lk_append(report, demo_jump_law(theta), samples, options);
  pushforward_append(report, demo_jump_law(theta));
  report.wall_seconds = timer.seconds();
  return report;
}

ExperimentReport verify_root(unsigned n_roots, double theta, std::uint64_t samples,
                             const SuiteOptions& options) {
  Timer timer;
  ExperimentReport report =
      make_report(options, "verify-root",
                  "theta = " + fmt(theta) + ", n = " + std::to_string(n_roots) +
                      " roots, N = " + std::to_string(samples) +
                      "; excursion approximant at n = 64",
                  options.workers);
  root_append(report, demo_jump_law(theta), n_roots, samples, options);
  excursion_append(report, demo_jump_law(theta), 64, samples, options);
  report.wall_seconds = timer.seconds();
  return report;
}

ExperimentReport verify_star_mass(std::uint64_t samples, const SuiteOptions& options) {
  Timer timer;
  ExperimentReport report =
      make_report(options, "verify-star-mass",
                  "two-atom jump measure, N = " + std::to_string(samples),
                  options.workers);
  star_append(report, demo_real_levy(), samples, options);
  report.wall_seconds = timer.seconds();
  return report;
}

ExperimentReport verify_branching(std::uint64_t samples, const SuiteOptions& options) {
  Timer timer;
  ExperimentReport report =
      make_report(options, "verify-branching",
                  "N = " + std::to_string(samples) + " per side; 200 coupled paths",
                  options.workers);
  branching_append(report, samples, options);
  ExperimentReport coupling = run_gw_coupling(options);
  for (ReportRow& row : coupling.rows) {
    report.rows.push_back(std::move(row));
  }
  for (std::string& warning : coupling.warnings) {
    report.warnings.push_back(std::move(warning));
  }
  report.wall_seconds = timer.seconds();
  return report;
}

std::vector<ExperimentReport> run_full_suite(const SuiteOptions& options) {
  std::vector<ExperimentReport> out;
  out.push_back(run_factorization_round_trip(options));
  out.push_back(run_truncation_consistency(options));
  out.push_back(run_truncated_homomorphism(options));
  out.push_back(run_pair_measure_concat_identity(options));
  out.push_back(run_ball_count_additivity(options));
  out.push_back(run_power_sum_dual(options));
  out.push_back(run_levy_khintchine_cpf(options));
  out.push_back(run_root_concatenation(options));
  out.push_back(run_excursion_approximant(options));
  out.push_back(run_star_mass_infdiv(options));
  out.push_back(run_trunk_threshold(options));
  out.push_back(run_generator_closed_form(options));
  out.push_back(run_gw_branching(options));
  out.push_back(run_gw_coupling(options));
  out.push_back(run_marked_suite(options));
  return out;
}

}  // namespace umcalc

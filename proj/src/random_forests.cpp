#include "umcalc/random_forests.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "umcalc/rng.hpp"
#include "umcalc/semigroup.hpp"

namespace umcalc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double integrate(const std::function<double(double)>& f, double lo, double hi) {
  if (!(hi > lo)) {
    return 0.0;
  }
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, lo, hi, 12, 1e-12);
}

}  // namespace

LevyModel::LevyModel(double theta, Height depth, std::vector<LevyAtom> atoms)
    : theta_(theta), depth_(depth), atoms_(std::move(atoms)) {
  if (!(theta >= 0) || !std::isfinite(theta)) {
    throw std::invalid_argument("rate theta must be finite and nonnegative");
  }
  if (depth.units() <= 0) {
    throw std::invalid_argument("model depth must be positive");
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < atoms_.size(); ++k) {
    LevyAtom& atom = atoms_[k];
    if (!(atom.weight > 0)) {
      throw std::invalid_argument("jump weights must be positive");
    }
    atom.tree = canonicalize(atom.tree);
    if (atom.tree.is_null()) {
      throw std::invalid_argument("jump " + std::to_string(k) + " is the null space");
    }
    if (atom.tree.diameter() > depth.doubled()) {
      throw std::invalid_argument("jump " + std::to_string(k) + " has diameter above 2*depth");
    }
    sum += atom.weight;
  }
  if (!atoms_.empty()) {
    if (std::abs(sum - 1.0) > 1e-12) {
      throw std::invalid_argument("jump weights must sum to 1 within 1e-12");
    }
    for (LevyAtom& atom : atoms_) {
      atom.weight /= sum;
    }
  } else if (theta > 0) {
    throw std::invalid_argument("positive theta needs at least one jump");
  }
}

Dendrogram sample_cpf(const LevyModel& model, std::uint64_t seed) {
  CounterRng count_rng(seed, "cpf.count");
  const std::uint64_t count = count_rng.poisson(model.theta());
  if (count == 0 || model.atoms().empty()) {
    return Dendrogram::null();
  }
  std::vector<double> weights;
  weights.reserve(model.atoms().size());
  for (const LevyAtom& atom : model.atoms()) {
    weights.push_back(atom.weight);
  }
  CounterRng pick_rng(seed, "cpf.pick");
  std::vector<Dendrogram> parts;
  parts.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    parts.push_back(model.atoms()[pick_rng.categorical(weights)].tree);
  }
  return concat(model.depth(), parts);
}

double cpf_log_laplace_exact(const LevyModel& model, const PolynomialSpec& spec, Height h,
                             std::uint64_t budget) {
  if (h.units() <= 0 || h > model.depth()) {
    throw std::invalid_argument("log-Laplace depth must satisfy 0 < h <= model depth");
  }
  if (spec.constant != 0.0) {
    throw std::invalid_argument(
        "closed-form log-Laplace needs a zero constant term (additivity over concatenation)");
  }
  const PolynomialSpec truncated = spec.with_depth(h);
  double sum = 0.0;
  for (const LevyAtom& atom : model.atoms()) {
    sum += atom.weight * (1.0 - std::exp(-eval_polynomial(truncated, atom.tree, budget)));
  }
  return model.theta() * sum;
}

LevyModel cpf_levy_at_depth(const LevyModel& model, Height h) {
  if (h.units() <= 0 || h > model.depth()) {
    throw std::invalid_argument("pushforward depth must satisfy 0 < h <= model depth");
  }
  std::map<std::string, LevyAtom> merged;
  for (const LevyAtom& atom : model.atoms()) {
    Dendrogram image = truncate(h, atom.tree);
    const std::string key = encode(image).bytes;
    auto [it, inserted] = merged.try_emplace(key, LevyAtom{0.0, std::move(image)});
    it->second.weight += atom.weight;
  }
  std::vector<LevyAtom> atoms;
  atoms.reserve(merged.size());
  for (auto& [key, atom] : merged) {
    atoms.push_back(std::move(atom));
  }
  return LevyModel(model.theta(), h, std::move(atoms));
}

LevyModel nth_root_cpf(const LevyModel& model, std::uint64_t n) {
  if (n == 0) {
    throw std::invalid_argument("root index must be at least 1");
  }
  return LevyModel(model.theta() / static_cast<double>(n), model.depth(), model.atoms());
}

McEstimate estimate_levy_functional(const LevyModel& model, std::uint64_t n,
                                    const PolynomialSpec& spec, Height h, std::uint64_t samples,
                                    std::uint64_t seed, unsigned workers, std::uint64_t budget) {
  if (h.units() <= 0 || h > model.depth()) {
    throw std::invalid_argument("functional depth must satisfy 0 < h <= model depth");
  }
  const LevyModel root = nth_root_cpf(model, n);
  const McEstimate laplace = laplace_estimate(
      [&root](std::uint64_t s) { return sample_cpf(root, s); }, spec.with_depth(h), samples, seed,
      workers, budget);
  const double scale = static_cast<double>(n);
  return McEstimate{scale * (1.0 - laplace.value), scale * laplace.std_error, laplace.samples};
}

void RealLevySpec::validate() const {
  for (const RealLevyAtom& atom : atoms) {
    if (!(atom.mass > 0) || !std::isfinite(atom.mass)) {
      throw std::invalid_argument("mass atoms must be positive");
    }
    if (!(atom.rate >= 0) || !std::isfinite(atom.rate)) {
      throw std::invalid_argument("atom rates must be finite and nonnegative");
    }
  }
  if (density) {
    if (!(density_lower > 0)) {
      throw std::invalid_argument(
          "density component needs a positive small-jump truncation threshold");
    }
    if (!(density_upper > density_lower) || !std::isfinite(density_upper)) {
      throw std::invalid_argument("density support must be a bounded interval above the threshold");
    }
  }
}

double RealLevySpec::total_rate() const {
  validate();
  double rate = 0.0;
  for (const RealLevyAtom& atom : atoms) {
    rate += atom.rate;
  }
  if (density) {
    rate += integrate(density, density_lower, density_upper);
  }
  return rate;
}

double RealLevySpec::log_laplace(double s) const {
  validate();
  if (!(s >= 0)) {
    throw std::invalid_argument("Laplace argument must be nonnegative");
  }
  double out = 0.0;
  for (const RealLevyAtom& atom : atoms) {
    out += atom.rate * (1.0 - std::exp(-s * atom.mass));
  }
  if (density) {
    const auto f = density;
    out += integrate([f, s](double x) { return f(x) * (1.0 - std::exp(-s * x)); }, density_lower,
                     density_upper);
  }
  return out;
}

Dendrogram star_forest_from_levy(Height h, const RealLevySpec& nu, std::uint64_t seed) {
  if (h.units() <= 0) {
    throw std::invalid_argument("star forest needs a positive depth");
  }
  nu.validate();
  std::vector<Dendrogram> points;

  CounterRng atom_rng(seed, "star.atoms");
  for (const RealLevyAtom& atom : nu.atoms) {
    const std::uint64_t count = atom_rng.poisson(atom.rate);
    for (std::uint64_t i = 0; i < count; ++i) {
      points.push_back(Dendrogram::leaf(atom.mass));
    }
  }

  if (nu.density) {
    const double rate = integrate(nu.density, nu.density_lower, nu.density_upper);
    CounterRng density_rng(seed, "star.density");
    const std::uint64_t count = density_rng.poisson(rate);
    for (std::uint64_t i = 0; i < count; ++i) {
      const double u = density_rng.uniform();
      // Inverse CDF by bisection on the integrated density.
      double lo = nu.density_lower;
      double hi = nu.density_upper;
      for (int step = 0; step < 60; ++step) {
        const double mid = 0.5 * (lo + hi);
        if (integrate(nu.density, nu.density_lower, mid) < u * rate) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      points.push_back(Dendrogram::leaf(0.5 * (lo + hi)));
    }
  }
  return concat(h, points);
}

namespace {

std::size_t founder_count(double mass, double atom_mass) {
  const double ratio = mass / atom_mass;
  const double rounded = std::round(ratio);
  if (rounded < 0.5 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
    throw std::invalid_argument("start masses must be positive multiples of atom_mass");
  }
  return static_cast<std::size_t>(rounded);
}

// Survivor genealogy below one individual at the observation time.
Dendrogram survivor_subtree(const GwHistory& history, std::size_t id, double time) {
  const GwHistory::Individual& ind = history.individuals[id];
  if (ind.birth > time) {
    return Dendrogram::null();
  }
  if (ind.death > time) {
    return Dendrogram::leaf(history.atom_mass);
  }
  if (ind.child_a == GwHistory::Individual::kNone) {
    return Dendrogram::null();
  }
  Dendrogram left = survivor_subtree(history, ind.child_a, time);
  Dendrogram right = survivor_subtree(history, ind.child_b, time);
  if (left.is_null()) {
    return right;
  }
  if (right.is_null()) {
    return left;
  }
  return Dendrogram::node(Height::of(2.0 * (time - ind.death)),
                          {std::move(left), std::move(right)});
}

Dendrogram stretch_and_replace(const Dendrogram& start, const GwHistory& history, double time,
                               Height two_t, std::size_t* next_leaf) {
  if (start.is_leaf()) {
    std::vector<Dendrogram> survivors;
    for (std::size_t id : history.founders_per_leaf[*next_leaf]) {
      Dendrogram s = survivor_subtree(history, id, time);
      if (!s.is_null()) {
        survivors.push_back(std::move(s));
      }
    }
    ++*next_leaf;
    return Dendrogram::node(two_t, std::move(survivors));
  }
  std::vector<Dendrogram> kids;
  kids.reserve(start.children().size());
  for (const Dendrogram& c : start.children()) {
    kids.push_back(stretch_and_replace(c, history, time, two_t, next_leaf));
  }
  return Dendrogram::node(start.root_height() + two_t, std::move(kids));
}

}  // namespace

GwHistory gw_simulate(const Dendrogram& start, double horizon, double rate, double atom_mass,
                      std::uint64_t seed, std::string_view stream) {
  if (!(horizon >= 0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("horizon must be finite and nonnegative");
  }
  if (!(rate >= 0) || !std::isfinite(rate)) {
    throw std::invalid_argument("branching rate must be finite and nonnegative");
  }
  if (!(atom_mass > 0)) {
    throw std::invalid_argument("atom_mass must be positive");
  }
  GwHistory history;
  history.start = canonicalize(start);
  history.horizon = horizon;
  history.rate = rate;
  history.atom_mass = atom_mass;

  std::size_t founder_index = 0;
  for (const Dendrogram::Atom& atom : history.start.atoms()) {
    const std::size_t k = founder_count(atom.mass, atom_mass);
    std::vector<std::size_t> founders;
    founders.reserve(k);
    for (std::size_t c = 0; c < k; ++c) {
      const std::size_t root = history.individuals.size();
      founders.push_back(root);
      history.individuals.push_back({0.0, kInf, GwHistory::Individual::kNone,
                                     GwHistory::Individual::kNone});

      CounterRng rng(seed, std::string(stream) + ".founder." + std::to_string(founder_index));
      ++founder_index;
      std::vector<std::size_t> stack{root};
      while (!stack.empty()) {
        const std::size_t id = stack.back();
        stack.pop_back();
        if (rate == 0) {
          continue;
        }
        const double life = rng.exponential(rate);
        const double death = history.individuals[id].birth + life;
        if (death >= horizon) {
          continue;  // alive at the horizon; death stays infinite
        }
        history.individuals[id].death = death;
        if (rng.bernoulli(0.5)) {
          const std::size_t a = history.individuals.size();
          history.individuals[id].child_a = a;
          history.individuals[id].child_b = a + 1;
          history.individuals.push_back({death, kInf, GwHistory::Individual::kNone,
                                         GwHistory::Individual::kNone});
          history.individuals.push_back({death, kInf, GwHistory::Individual::kNone,
                                         GwHistory::Individual::kNone});
          stack.push_back(a + 1);
          stack.push_back(a);
        }
      }
    }
    history.founders_per_leaf.push_back(std::move(founders));
  }
  return history;
}

Dendrogram gw_snapshot(const GwHistory& history, double time) {
  if (!(time >= 0) || time > history.horizon) {
    throw std::invalid_argument("snapshot time must lie in [0, horizon]");
  }
  if (history.start.is_null()) {
    return Dendrogram::null();
  }
  std::size_t next_leaf = 0;
  return canonicalize(
      stretch_and_replace(history.start, history, time, Height::of(2.0 * time), &next_leaf));
}

Dendrogram gw_genealogy(const GwConfig& config, std::uint64_t seed) {
  if (config.initial == 0) {
    return Dendrogram::null();
  }
  const Dendrogram start =
      Dendrogram::leaf(static_cast<double>(config.initial) * config.atom_mass);
  return gw_evolve(start, config.horizon, config.rate, config.atom_mass, seed);
}

Dendrogram gw_evolve(const Dendrogram& start, double time, double rate, double atom_mass,
                     std::uint64_t seed, std::string_view stream) {
  return gw_snapshot(gw_simulate(start, time, rate, atom_mass, seed, stream), time);
}

Dendrogram gw_evolve_parts(std::span<const Dendrogram> parts, Height h, double time, double rate,
                           double atom_mass, std::uint64_t seed) {
  if (h.units() < 0) {
    throw std::invalid_argument("part depth must be nonnegative");
  }
  std::vector<Dendrogram> evolved;
  evolved.reserve(parts.size());
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i].diameter() > h.doubled()) {
      throw std::invalid_argument("part " + std::to_string(i) + " has diameter above 2h");
    }
    evolved.push_back(
        gw_evolve(parts[i], time, rate, atom_mass, seed, "gw.part." + std::to_string(i)));
  }
  return concat(h + Height::of(time), evolved);
}

Dendrogram branching_convolution_sample(const SeededSampler& left, const SeededSampler& right,
                                        Height h, std::uint64_t seed) {
  if (!left || !right) {
    throw std::invalid_argument("both samplers are required");
  }
  const Dendrogram a = left(derive_seed(seed, 1));
  const Dendrogram b = right(derive_seed(seed, 2));
  return concat(h, {a, b});
}

}  // namespace umcalc

#include "umcalc/semigroup.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace umcalc {
namespace {

void require_positive_depth(Height h, const char* op) {
  if (h.units() <= 0) {
    throw std::invalid_argument(std::string(op) + " requires a positive depth");
  }
}

// Maximal subtrees with all internal heights strictly below the threshold:
// the open-ball components at threshold = 2h. Input must be canonical.
void components_below(const Dendrogram& d, Height threshold, std::vector<Dendrogram>* out) {
  if (d.is_null()) {
    return;
  }
  if (d.is_leaf() || d.root_height() < threshold) {
    out->push_back(d);
    return;
  }
  for (const Dendrogram& c : d.children()) {
    components_below(c, threshold, out);
  }
}

std::vector<Dendrogram> prime_components(const Dendrogram& canonical, Height two_h) {
  std::vector<Dendrogram> primes;
  components_below(canonical, two_h, &primes);
  std::sort(primes.begin(), primes.end(), [](const Dendrogram& a, const Dendrogram& b) {
    return encode(a).bytes < encode(b).bytes;
  });
  return primes;
}

Dendrogram truncate_rec(const Dendrogram& d, Height two_h) {
  if (d.is_null() || d.is_leaf()) {
    return d;
  }
  std::vector<Dendrogram> kids;
  kids.reserve(d.children().size());
  for (const Dendrogram& c : d.children()) {
    kids.push_back(truncate_rec(c, two_h));
  }
  return Dendrogram::node(d.root_height().min(two_h), std::move(kids));
}

Dendrogram trunk_rec(const Dendrogram& d, Height two_h) {
  if (d.is_leaf() || d.root_height() < two_h) {
    return Dendrogram::leaf(d.total_mass());
  }
  std::vector<Dendrogram> kids;
  kids.reserve(d.children().size());
  for (const Dendrogram& c : d.children()) {
    kids.push_back(trunk_rec(c, two_h));
  }
  return Dendrogram::node(d.root_height() - two_h, std::move(kids));
}

std::multiset<std::string> prime_encoding_multiset(Height h, const Dendrogram& d) {
  std::multiset<std::string> out;
  for (const Dendrogram& p : prime_components(canonicalize(truncate(h, d)), h.doubled())) {
    out.insert(encode(p).bytes);
  }
  return out;
}

TopsSummary summarize(const std::vector<Dendrogram>& primes) {
  TopsSummary s;
  s.ball_count = primes.size();
  for (const Dendrogram& p : primes) {
    s.masses.push_back(p.total_mass());
    s.primes.push_back(encode(p).bytes);
  }
  std::sort(s.masses.begin(), s.masses.end(), std::greater<>());
  std::sort(s.primes.begin(), s.primes.end());
  return s;
}

}  // namespace

Dendrogram concat(Height h, std::span<const Dendrogram> parts) {
  if (h.is_negative()) {
    throw std::invalid_argument("concat requires a nonnegative depth");
  }
  const Height two_h = h.doubled();
  std::vector<Dendrogram> kept;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i].is_null()) {
      continue;
    }
    if (parts[i].diameter() > two_h) {
      throw std::invalid_argument("concat part " + std::to_string(i) +
                                  " has diameter above 2h (diameter " +
                                  parts[i].diameter().str() + ", 2h " + two_h.str() + ")");
    }
    kept.push_back(canonicalize(parts[i]));
  }
  return canonicalize(Dendrogram::node(two_h, std::move(kept)));
}

Dendrogram concat(Height h, std::initializer_list<Dendrogram> parts) {
  return concat(h, std::span<const Dendrogram>(parts.begin(), parts.size()));
}

Dendrogram truncate(Height h, const Dendrogram& d) {
  if (h.is_negative()) {
    throw std::invalid_argument("truncate requires a nonnegative depth");
  }
  return canonicalize(truncate_rec(canonicalize(d), h.doubled()));
}

ForestDecomposition decompose(Height h, const Dendrogram& d) {
  require_positive_depth(h, "decompose");
  ForestDecomposition out;
  out.depth = h;
  const Dendrogram canon = canonicalize(d);
  out.input_truncated = canon.diameter() > h.doubled();
  const Dendrogram forest = out.input_truncated ? truncate(h, canon) : canon;
  out.source = encode(forest);
  out.primes = prime_components(forest, h.doubled());
  return out;
}

BallCount count_balls(Height h, const Dendrogram& d) {
  require_positive_depth(h, "count_balls");
  std::vector<Dendrogram> primes;
  components_below(canonicalize(d), h.doubled(), &primes);
  return BallCount{primes.size(), false};
}

Dendrogram trunk(Height h, const Dendrogram& d) {
  require_positive_depth(h, "trunk");
  const Dendrogram canon = canonicalize(d);
  if (canon.is_null()) {
    return canon;
  }
  return canonicalize(trunk_rec(canon, h.doubled()));
}

bool is_subforest(Height h, const Dendrogram& u, const Dendrogram& v) {
  require_positive_depth(h, "is_subforest");
  const std::multiset<std::string> pu = prime_encoding_multiset(h, u);
  const std::multiset<std::string> pv = prime_encoding_multiset(h, v);
  return std::includes(pv.begin(), pv.end(), pu.begin(), pu.end());
}

Height TopsPath::interval_low(std::size_t i) const {
  return i == 0 ? Height() : breakpoints[i - 1];
}

std::optional<Height> TopsPath::interval_high(std::size_t i) const {
  return i < breakpoints.size() ? std::optional<Height>(breakpoints[i]) : std::nullopt;
}

TopsPath tops_path(const Dendrogram& d) {
  const Dendrogram canon = canonicalize(d);
  TopsPath path;
  if (canon.is_null()) {
    return path;
  }

  std::set<Height> heights;
  struct Collect {
    static void run(const Dendrogram& d, std::set<Height>* heights) {
      if (!d.is_node()) {
        return;
      }
      if (d.root_height().units() > 0) {
        heights->insert(d.root_height());
      }
      for (const Dendrogram& c : d.children()) {
        run(c, heights);
      }
    }
  };
  Collect::run(canon, &heights);

  // The factorization changes exactly when 2h crosses a node height; on the
  // interval up to and including that crossing the node still separates.
  // Breakpoints are printed as height/2; an odd unit count rounds the
  // printed value up by half a unit, the summaries themselves are exact.
  std::vector<Height> thresholds(heights.begin(), heights.end());
  for (Height t : thresholds) {
    path.breakpoints.push_back(Height::from_units((t.units() + 1) / 2));
    path.summaries.push_back(summarize(prime_components(canon, t)));
  }
  const Height above = canon.diameter() + Height::from_units(1);
  path.summaries.push_back(summarize(prime_components(canon, above.doubled())));
  return path;
}

std::vector<MassFragmentationStep> mass_fragmentation_path(const Dendrogram& d) {
  const TopsPath path = tops_path(d);
  std::vector<MassFragmentationStep> out;
  for (std::size_t i = 0; i < path.interval_count(); ++i) {
    out.push_back({path.interval_low(i), path.interval_high(i), path.summaries[i].masses});
  }
  return out;
}

double modulus_mass(double delta, Height h, const Dendrogram& d) {
  require_positive_depth(h, "modulus_mass");
  if (delta < 0) {
    throw std::invalid_argument("modulus_mass requires a nonnegative threshold");
  }
  std::vector<Dendrogram> primes;
  components_below(canonicalize(d), h.doubled(), &primes);
  double sum = 0.0;
  for (const Dendrogram& p : primes) {
    const double mass = p.total_mass();
    if (mass < delta) {
      sum += mass;
    }
  }
  return sum;
}

}  // namespace umcalc

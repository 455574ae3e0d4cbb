#include "umcalc/dendrogram.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <utility>

namespace umcalc {
namespace {

constexpr std::uint64_t kFnvOffset = 14695981039346656037ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = kFnvOffset;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

std::string mass_bytes(double mass) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%a", mass);
  return std::string(buf);
}

// Linearization of the tree as stored, children in stored order. On a
// canonical tree this is the canonical encoding.
void encode_raw(const Dendrogram& d, std::string& out) {
  if (d.is_null()) {
    out += "()";
    return;
  }
  if (d.is_leaf()) {
    out += "(m=";
    out += mass_bytes(d.leaf_mass());
    if (d.leaf_mark()) {
      out += "|";
      out += *d.leaf_mark();
    }
    out += ")";
    return;
  }
  out += "(h=";
  out += d.root_height().str();
  for (const Dendrogram& c : d.children()) {
    encode_raw(c, out);
  }
  out += ")";
}

std::string encode_raw(const Dendrogram& d) {
  std::string out;
  encode_raw(d, out);
  return out;
}

void check_well_formed_rec(const Dendrogram& d, std::optional<Height> parent_height,
                           std::vector<ValidationIssue>* issues) {
  using Severity = ValidationIssue::Severity;
  if (d.is_null()) {
    if (parent_height) {
      issues->push_back({Severity::kError, "null child under an internal node"});
    }
    return;
  }
  if (d.is_leaf()) {
    if (!std::isfinite(d.leaf_mass())) {
      issues->push_back({Severity::kError, "non-finite leaf mass"});
    } else if (d.leaf_mass() < 0) {
      issues->push_back({Severity::kError, "negative leaf mass"});
    } else if (d.leaf_mass() == 0) {
      issues->push_back({Severity::kNonCanonical, "zero-mass leaf"});
    }
    if (d.leaf_mark() && !mark_token_ok(*d.leaf_mark())) {
      issues->push_back({Severity::kError, "invalid mark token"});
    }
    return;
  }
  if (d.root_height().is_negative()) {
    issues->push_back({Severity::kError, "negative node height"});
  }
  if (parent_height) {
    if (d.root_height() > *parent_height) {
      issues->push_back({Severity::kError, "child height exceeds parent height"});
    } else if (d.root_height() == *parent_height) {
      issues->push_back({Severity::kNonCanonical, "equal-height nesting"});
    }
  }
  if (d.children().size() == 1) {
    issues->push_back({Severity::kNonCanonical, "unary internal node"});
  }
  for (const Dendrogram& c : d.children()) {
    check_well_formed_rec(c, d.root_height(), issues);
  }
}

}  // namespace

bool mark_token_ok(const Mark& mark) {
  if (mark.empty()) {
    return false;
  }
  for (char c : mark) {
    if (c == '(' || c == ')' || c == '|' || std::isspace(static_cast<unsigned char>(c))) {
      return false;
    }
  }
  return true;
}

Dendrogram Dendrogram::leaf(double mass, std::optional<Mark> mark) {
  Dendrogram d;
  d.kind_ = Kind::kLeaf;
  d.mass_ = mass;
  d.mark_ = std::move(mark);
  return d;
}

Dendrogram Dendrogram::node(Height height, std::vector<Dendrogram> children) {
  std::vector<Dendrogram> kept;
  kept.reserve(children.size());
  for (Dendrogram& c : children) {
    if (!c.is_null()) {
      kept.push_back(std::move(c));
    }
  }
  if (kept.empty()) {
    return null();
  }
  Dendrogram d;
  d.kind_ = Kind::kNode;
  d.height_ = height;
  d.children_ = std::move(kept);
  return d;
}

double Dendrogram::total_mass() const {
  if (is_null()) {
    return 0.0;
  }
  if (is_leaf()) {
    return mass_;
  }
  double sum = 0.0;
  for (const Dendrogram& c : children_) {
    sum += c.total_mass();
  }
  return sum;
}

std::size_t Dendrogram::atom_count() const {
  if (is_null()) {
    return 0;
  }
  if (is_leaf()) {
    return 1;
  }
  std::size_t n = 0;
  for (const Dendrogram& c : children_) {
    n += c.atom_count();
  }
  return n;
}

Height Dendrogram::diameter() const {
  if (is_node() && atom_count() >= 2) {
    return height_;
  }
  return Height();
}

std::vector<Dendrogram::Atom> Dendrogram::atoms() const {
  std::vector<Atom> out;
  out.reserve(atom_count());
  struct Walk {
    static void run(const Dendrogram& d, std::vector<Atom>* out) {
      if (d.is_leaf()) {
        out->push_back({d.leaf_mass(), d.leaf_mark()});
        return;
      }
      for (const Dendrogram& c : d.children()) {
        run(c, out);
      }
    }
  };
  if (!is_null()) {
    Walk::run(*this, &out);
  }
  return out;
}

bool ValidationReport::well_formed() const {
  return std::none_of(issues.begin(), issues.end(), [](const ValidationIssue& i) {
    return i.severity == ValidationIssue::Severity::kError;
  });
}

std::string ValidationReport::to_string() const {
  if (issues.empty()) {
    return "canonical";
  }
  std::string out;
  for (const ValidationIssue& i : issues) {
    out += (i.severity == ValidationIssue::Severity::kError) ? "error: " : "noncanonical: ";
    out += i.detail;
    out += "\n";
  }
  return out;
}

ValidationReport validate(const Dendrogram& d) {
  ValidationReport report;
  check_well_formed_rec(d, std::nullopt, &report.issues);
  if (report.well_formed() && encode_raw(d) != encode_raw(canonicalize(d))) {
    bool flagged = std::any_of(report.issues.begin(), report.issues.end(),
                               [](const ValidationIssue& i) {
                                 return i.severity == ValidationIssue::Severity::kNonCanonical;
                               });
    if (!flagged) {
      report.issues.push_back({ValidationIssue::Severity::kNonCanonical,
                               "children unsorted or zero-distance atoms unmerged"});
    }
  }
  return report;
}

Dendrogram canonicalize(const Dendrogram& d) {
  {
    ValidationReport report;
    check_well_formed_rec(d, std::nullopt, &report.issues);
    if (!report.well_formed()) {
      throw std::invalid_argument("malformed dendrogram: " + report.to_string());
    }
  }

  struct Canon {
    static Dendrogram run(const Dendrogram& d) {
      if (d.is_null()) {
        return d;
      }
      if (d.is_leaf()) {
        return d.leaf_mass() > 0 ? d : Dendrogram::null();
      }
      std::vector<Dendrogram> flat;
      for (const Dendrogram& c : d.children()) {
        Dendrogram cc = run(c);
        if (cc.is_null()) {
          continue;
        }
        if (cc.is_node() && cc.root_height() == d.root_height()) {
          for (const Dendrogram& gc : cc.children()) {
            flat.push_back(gc);
          }
        } else {
          flat.push_back(std::move(cc));
        }
      }
      if (d.root_height().is_zero()) {
        // Children of a height-0 node are leaves; merge by mark.
        std::map<std::optional<Mark>, double> merged;
        for (const Dendrogram& c : flat) {
          merged[c.leaf_mark()] += c.leaf_mass();
        }
        std::vector<Dendrogram> leaves;
        for (const auto& [mark, mass] : merged) {
          if (mass > 0) {
            leaves.push_back(Dendrogram::leaf(mass, mark));
          }
        }
        flat = std::move(leaves);
      }
      if (flat.empty()) {
        return Dendrogram::null();
      }
      if (flat.size() == 1) {
        return std::move(flat.front());
      }
      std::vector<std::pair<std::string, std::size_t>> order;
      order.reserve(flat.size());
      for (std::size_t i = 0; i < flat.size(); ++i) {
        order.emplace_back(encode_raw(flat[i]), i);
      }
      std::sort(order.begin(), order.end());
      std::vector<Dendrogram> sorted;
      sorted.reserve(flat.size());
      for (const auto& [bytes, i] : order) {
        sorted.push_back(std::move(flat[i]));
      }
      return Dendrogram::node(d.root_height(), std::move(sorted));
    }
  };
  return Canon::run(d);
}

CanonicalEncoding encode(const Dendrogram& d) {
  CanonicalEncoding enc;
  enc.bytes = encode_raw(canonicalize(d));
  enc.hash = fnv1a(enc.bytes);
  return enc;
}

bool is_isomorphic(const Dendrogram& a, const Dendrogram& b) {
  return encode(a).bytes == encode(b).bytes;
}

Dendrogram scale_metric(double a, const Dendrogram& d) {
  if (!std::isfinite(a) || a <= 0) {
    throw std::invalid_argument("metric scale must be positive");
  }
  struct Scale {
    static Dendrogram run(const Dendrogram& d, double a) {
      if (d.is_null() || d.is_leaf()) {
        return d;
      }
      std::vector<Dendrogram> kids;
      kids.reserve(d.children().size());
      for (const Dendrogram& c : d.children()) {
        kids.push_back(run(c, a));
      }
      return Dendrogram::node(d.root_height().scaled(a), std::move(kids));
    }
  };
  return canonicalize(Scale::run(d, a));
}

Dendrogram scale_mass(double a, const Dendrogram& d) {
  if (!std::isfinite(a) || a < 0) {
    throw std::invalid_argument("mass scale must be nonnegative");
  }
  struct Scale {
    static Dendrogram run(const Dendrogram& d, double a) {
      if (d.is_null()) {
        return d;
      }
      if (d.is_leaf()) {
        return Dendrogram::leaf(d.leaf_mass() * a, d.leaf_mark());
      }
      std::vector<Dendrogram> kids;
      kids.reserve(d.children().size());
      for (const Dendrogram& c : d.children()) {
        kids.push_back(run(c, a));
      }
      return Dendrogram::node(d.root_height(), std::move(kids));
    }
  };
  return canonicalize(Scale::run(d, a));
}

}  // namespace umcalc

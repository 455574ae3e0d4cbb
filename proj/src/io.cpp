#include "umcalc/io.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace umcalc {

using nlohmann::json;

Dendrogram dendrogram_from_json(const json& doc) {
  if (doc.is_null()) {
    return Dendrogram::null();
  }
  if (!doc.is_object()) {
    throw std::invalid_argument("tree document must be an object or null");
  }
  if (doc.contains("mass")) {
    if (doc.contains("height") || doc.contains("children")) {
      throw std::invalid_argument("atom documents carry only mass and mark");
    }
    if (!doc["mass"].is_number()) {
      throw std::invalid_argument("atom mass must be a number");
    }
    std::optional<Mark> mark;
    if (doc.contains("mark") && !doc["mark"].is_null()) {
      if (!doc["mark"].is_string()) {
        throw std::invalid_argument("atom mark must be a string");
      }
      mark = doc["mark"].get<std::string>();
    }
    return Dendrogram::leaf(doc["mass"].get<double>(), std::move(mark));
  }
  if (doc.contains("height")) {
    if (!doc["height"].is_number()) {
      throw std::invalid_argument("node height must be a number");
    }
    if (!doc.contains("children") || !doc["children"].is_array() || doc["children"].empty()) {
      throw std::invalid_argument("merge nodes need a non-empty children array");
    }
    std::vector<Dendrogram> children;
    children.reserve(doc["children"].size());
    for (const json& child : doc["children"]) {
      Dendrogram c = dendrogram_from_json(child);
      if (c.is_null()) {
        throw std::invalid_argument("null child inside a merge node");
      }
      children.push_back(std::move(c));
    }
    return Dendrogram::node(Height::of(doc["height"].get<double>()), std::move(children));
  }
  throw std::invalid_argument("tree documents carry either mass or height");
}

json dendrogram_to_json(const Dendrogram& d) {
  if (d.is_null()) {
    return json(nullptr);
  }
  if (d.is_leaf()) {
    json out{{"mass", d.leaf_mass()}};
    if (d.leaf_mark()) {
      out["mark"] = *d.leaf_mark();
    }
    return out;
  }
  json children = json::array();
  for (const Dendrogram& c : d.children()) {
    children.push_back(dendrogram_to_json(c));
  }
  return json{{"height", d.root_height().value()}, {"children", std::move(children)}};
}

MarkSpace mark_space_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("kind")) {
    throw std::invalid_argument("mark space document needs a kind");
  }
  const std::string kind = doc["kind"].get<std::string>();
  if (kind == "alphabet") {
    std::vector<Mark> symbols;
    for (const json& s : doc.at("symbols")) {
      symbols.push_back(s.get<std::string>());
    }
    return MarkSpace::alphabet(std::move(symbols), doc.at("neutral").get<std::string>());
  }
  if (kind == "lattice") {
    std::vector<std::pair<std::int64_t, std::int64_t>> bounds;
    for (const json& b : doc.at("bounds")) {
      bounds.emplace_back(b.at(0).get<std::int64_t>(), b.at(1).get<std::int64_t>());
    }
    return MarkSpace::lattice(std::move(bounds));
  }
  throw std::invalid_argument("mark space kind must be alphabet or lattice");
}

json mark_space_to_json(const MarkSpace& space) {
  if (space.is_lattice()) {
    json bounds = json::array();
    for (const auto& [lo, hi] : space.bounds()) {
      bounds.push_back(json::array({lo, hi}));
    }
    return json{{"kind", "lattice"}, {"bounds", std::move(bounds)}};
  }
  return json{{"kind", "alphabet"},
              {"symbols", space.symbols()},
              {"neutral", space.neutral()}};
}

MarkedDendrogram marked_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("mark_space") || !doc.contains("tree")) {
    throw std::invalid_argument("marked documents carry mark_space and tree");
  }
  return marked_make(mark_space_from_json(doc["mark_space"]),
                     dendrogram_from_json(doc["tree"]));
}

json marked_to_json(const MarkedDendrogram& d) {
  return json{{"mark_space", mark_space_to_json(d.space)}, {"tree", dendrogram_to_json(d.tree)}};
}

namespace {

json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open " + path);
  }
  json doc;
  in >> doc;
  return doc;
}

}  // namespace

Dendrogram read_dendrogram_file(const std::string& path) {
  return dendrogram_from_json(parse_file(path));
}

void write_dendrogram_file(const std::string& path, const Dendrogram& d) {
  std::ofstream out(path);
  if (!out) {
    throw std::invalid_argument("cannot write " + path);
  }
  out << dendrogram_to_json(d).dump(2) << "\n";
}

Dendrogram read_any_tree_file(const std::string& path) {
  const json doc = parse_file(path);
  if (doc.is_object() && doc.contains("tree")) {
    return marked_from_json(doc).tree;
  }
  return dendrogram_from_json(doc);
}

void emit_path_csv(const TopsPath& path, std::ostream& out) {
  std::size_t width = 0;
  for (const TopsSummary& summary : path.summaries) {
    width = std::max(width, summary.masses.size());
  }
  out << "h_low,h_high,count";
  for (std::size_t i = 1; i <= width; ++i) {
    out << ",mass_" << i;
  }
  out << "\n";
  for (std::size_t i = 0; i < path.interval_count(); ++i) {
    const TopsSummary& summary = path.summaries[i];
    out << path.interval_low(i).str() << ",";
    if (const auto high = path.interval_high(i)) {
      out << high->str();
    } else {
      out << "inf";
    }
    out << "," << summary.ball_count;
    for (std::size_t c = 0; c < width; ++c) {
      out << ",";
      if (c < summary.masses.size()) {
        std::ostringstream cell;
        cell.precision(17);
        cell << summary.masses[c];
        out << cell.str();
      }
    }
    out << "\n";
  }
}

}  // namespace umcalc

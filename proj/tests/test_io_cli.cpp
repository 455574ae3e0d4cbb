#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "umcalc/dendrogram.hpp"
#include "umcalc/height.hpp"
#include "umcalc/io.hpp"
#include "umcalc/marked.hpp"
#include "umcalc/semigroup.hpp"

using namespace umcalc;
using nlohmann::json;

namespace {

// Merge height equals the pairwise distance.
Dendrogram pair_space(double first, double second, double distance) {
  return Dendrogram::node(Height::of(distance),
                          {Dendrogram::leaf(first), Dendrogram::leaf(second)});
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("umcalc_io_" + name);
}

std::string write_file(const std::string& name, const std::string& text) {
  const std::filesystem::path path = temp_file(name);
  std::ofstream out(path, std::ios::binary);
  REQUIRE(static_cast<bool>(out));
  out << text;
  out.close();
  return path.string();
}

struct CliResult {
  int exit_code = -1;
  std::string output;
};

const char* cli_binary() { return std::getenv("UMCALC_BIN"); }

CliResult run_cli(const std::string& args) {
  const std::string command = std::string(cli_binary()) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string output;
  char buffer[512];
  std::size_t got = 0;
  while ((got = std::fread(buffer, 1, sizeof(buffer), pipe)) > 0) {
    output.append(buffer, got);
  }
  const int status = pclose(pipe);
  CliResult result;
  result.output = std::move(output);
  if (WIFEXITED(status)) {
    result.exit_code = WEXITSTATUS(status);
  }
  return result;
}

}  // namespace

TEST_CASE("tree documents round trip through JSON") {
  CHECK(dendrogram_to_json(Dendrogram::null()).is_null());
  CHECK(dendrogram_from_json(json(nullptr)).is_null());

  const Dendrogram atom = Dendrogram::leaf(1.5, Mark("a"));
  const json atom_doc = dendrogram_to_json(atom);
  CHECK(atom_doc.at("mass").get<double>() == 1.5);
  CHECK(atom_doc.at("mark").get<std::string>() == "a");
  CHECK(is_isomorphic(dendrogram_from_json(atom_doc), atom));

  const Dendrogram plain = Dendrogram::leaf(2.0);
  CHECK_FALSE(dendrogram_to_json(plain).contains("mark"));

  const Dendrogram nested = Dendrogram::node(
      Height::of(4.0), {pair_space(1.0, 2.0, 1.0), Dendrogram::leaf(3.0)});
  const json nested_doc = dendrogram_to_json(nested);
  CHECK(nested_doc.at("height").get<double>() == 4.0);
  CHECK(nested_doc.at("children").size() == 2);
  CHECK(encode(dendrogram_from_json(nested_doc)) == encode(nested));

  // Heights are quantized on input, so parse(print(d)) is exact.
  const json odd_height = json::parse(R"({"height": 0.1234567890123,
                                          "children": [{"mass": 1}, {"mass": 2}]})");
  const Dendrogram parsed = dendrogram_from_json(odd_height);
  CHECK(parsed.root_height() == Height::of(0.1234567890123));
  CHECK(encode(dendrogram_from_json(dendrogram_to_json(parsed))) == encode(parsed));
}

TEST_CASE("malformed tree documents are rejected") {
  const auto reject = [](const char* text) {
    CHECK_THROWS_AS(dendrogram_from_json(json::parse(text)), std::invalid_argument);
  };
  reject(R"({"mass": 1, "height": 2})");             // both atom and node keys
  reject(R"({"mass": "heavy"})");                    // non-numeric mass
  reject(R"({"mass": 1, "mark": 7})");               // non-string mark
  reject(R"({"height": 1})");                        // node without children
  reject(R"({"height": 1, "children": []})");        // empty children array
  reject(R"({"height": "tall", "children": [{"mass": 1}]})");
  reject(R"({"height": 1, "children": [{"mass": 1}, null]})");  // null child
  reject(R"({"label": "x"})");                       // unknown shape
  reject(R"([1, 2, 3])");                            // not an object
  reject(R"("leaf")");
}

TEST_CASE("mark space documents round trip and reject bad kinds") {
  const MarkSpace letters = MarkSpace::alphabet({"a", "b", "c"}, "a");
  const json letters_doc = mark_space_to_json(letters);
  CHECK(letters_doc.at("kind") == "alphabet");
  CHECK(letters_doc.at("symbols").size() == 3);
  CHECK(letters_doc.at("neutral") == "a");
  CHECK(mark_space_from_json(letters_doc) == letters);

  const MarkSpace box = MarkSpace::lattice({{-1, 1}, {0, 2}});
  const json box_doc = mark_space_to_json(box);
  CHECK(box_doc.at("kind") == "lattice");
  CHECK(box_doc.at("bounds") == json::parse("[[-1,1],[0,2]]"));
  CHECK(mark_space_from_json(box_doc) == box);

  CHECK_THROWS_AS(mark_space_from_json(json::parse(R"({"kind": "colour"})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(mark_space_from_json(json::parse(R"({"symbols": ["a"]})")),
                  std::invalid_argument);
}

TEST_CASE("marked documents round trip and validate their marks") {
  const MarkSpace letters = MarkSpace::alphabet({"a", "b"}, "a");
  const MarkedDendrogram marked = marked_make(
      letters, Dendrogram::node(Height::of(1.0), {Dendrogram::leaf(1.0, Mark("a")),
                                                  Dendrogram::leaf(2.0, Mark("b"))}));
  const json doc = marked_to_json(marked);
  const MarkedDendrogram back = marked_from_json(doc);
  CHECK(back.space == marked.space);
  CHECK(encode(back.tree) == encode(marked.tree));

  CHECK_THROWS_AS(marked_from_json(json::parse(R"({"tree": null})")),
                  std::invalid_argument);
  json bad = doc;
  bad["tree"]["children"][0]["mark"] = "z";  // outside the space
  CHECK_THROWS_AS(marked_from_json(bad), std::invalid_argument);
}

TEST_CASE("tree files round trip and marked wrappers are accepted") {
  const Dendrogram d = Dendrogram::node(
      Height::of(2.0), {pair_space(0.5, 0.25, 0.5), Dendrogram::leaf(1.0)});
  const std::string path = temp_file("roundtrip.json").string();
  write_dendrogram_file(path, d);
  CHECK(encode(read_dendrogram_file(path)) == encode(d));
  CHECK(encode(read_any_tree_file(path)) == encode(d));

  const std::string wrapped = write_file(
      "wrapped.json",
      R"({"mark_space": {"kind": "alphabet", "symbols": ["a", "b"], "neutral": "a"},
          "tree": {"height": 1.0,
                   "children": [{"mass": 1, "mark": "a"}, {"mass": 2, "mark": "b"}]}})");
  const Dendrogram tree = read_any_tree_file(wrapped);
  CHECK(tree.atom_count() == 2);
  CHECK(tree.atoms()[0].mark.has_value());

  CHECK_THROWS_AS(read_dendrogram_file(temp_file("missing.json").string()),
                  std::invalid_argument);
}

TEST_CASE("fragmentation path CSV matches golden outputs") {
  const auto render = [](const Dendrogram& d) {
    std::ostringstream out;
    emit_path_csv(tops_path(d), out);
    return out.str();
  };

  CHECK(render(Dendrogram::null()) == "h_low,h_high,count\n");
  CHECK(render(Dendrogram::leaf(2.5)) == "h_low,h_high,count,mass_1\n0,inf,1,2.5\n");

  // Two atoms at distance 3 split below depth 1.5 and merge above it; the
  // second row pads the missing mass_2 cell.
  CHECK(render(pair_space(2.0, 1.0, 3.0)) ==
        "h_low,h_high,count,mass_1,mass_2\n"
        "0,1.5,2,2,1\n"
        "1.5,inf,1,3,\n");
}

TEST_CASE("command line drives the document operations") {
  if (cli_binary() == nullptr) {
    MESSAGE("UMCALC_BIN not set; skipping the CLI integration checks");
    return;
  }

  const std::string wide =
      write_file("cli_wide.json", R"({"height": 5.0, "children": [{"mass": 1}, {"mass": 1}]})");
  const std::string triple = write_file(
      "cli_triple.json",
      R"({"height": 2.0, "children": [{"mass": 1}, {"mass": 2}, {"mass": 3}]})");
  const std::string single_a = write_file("cli_a.json", R"({"mass": 1.0})");
  const std::string single_b = write_file("cli_b.json", R"({"mass": 2.0})");
  const std::string unary =
      write_file("cli_unary.json", R"({"height": 1.0, "children": [{"mass": 2}]})");
  const std::string broken = write_file("cli_broken.json", R"({"mass": 1, "height": 2})");

  SUBCASE("truncate caps pairwise distances at 2h") {
    const CliResult r = run_cli("truncate --h 1 " + wide);
    REQUIRE(r.exit_code == 0);
    const Dendrogram out = dendrogram_from_json(json::parse(r.output));
    CHECK(encode(out) == encode(pair_space(1.0, 1.0, 2.0)));
  }

  SUBCASE("decompose lists open-ball primes") {
    const CliResult r = run_cli("decompose --h 1 " + triple);
    REQUIRE(r.exit_code == 0);
    const json doc = json::parse(r.output);
    CHECK(doc.at("count").get<std::size_t>() == 3);
    CHECK(doc.at("primes").size() == 3);
    for (const json& prime : doc.at("primes")) {
      CHECK(dendrogram_from_json(prime).atom_count() == 1);
    }
  }

  SUBCASE("count prints the ball count") {
    const CliResult r = run_cli("count --h 1 " + triple);
    REQUIRE(r.exit_code == 0);
    CHECK(r.output == "3\n");
  }

  SUBCASE("concat joins documents at the requested depth") {
    const CliResult r = run_cli("concat --h 1 " + single_a + " " + single_b);
    REQUIRE(r.exit_code == 0);
    const Dendrogram out = dendrogram_from_json(json::parse(r.output));
    CHECK(out.diameter() == Height::of(2.0));
    CHECK(out.total_mass() == 3.0);
  }

  SUBCASE("canon rewrites a document in normal form") {
    const CliResult r = run_cli("canon " + unary);
    REQUIRE(r.exit_code == 0);
    const Dendrogram out = dendrogram_from_json(json::parse(r.output));
    CHECK(out.is_leaf());
    CHECK(out.leaf_mass() == 2.0);
  }

  SUBCASE("eval prints the exact monomial value") {
    const std::string heavy = write_file("cli_heavy.json", R"({"mass": 2.5})");
    const CliResult r = run_cli("eval --phi one --m 1 " + heavy);
    REQUIRE(r.exit_code == 0);
    CHECK(r.output == "2.5\n");
  }

  SUBCASE("validate flags unreadable documents with exit code 2") {
    const CliResult r = run_cli("validate " + broken);
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("unreadable") != std::string::npos);
  }

  SUBCASE("unknown flags exit with the usage code") {
    const CliResult r = run_cli("truncate --h 1 --no-such-flag " + wide);
    CHECK(r.exit_code == 64);
  }
}

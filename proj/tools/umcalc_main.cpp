// Command-line surface: document manipulation (validate, canon, concat,
// truncate, decompose, trunk, count, fragmentation-path), polynomial
// evaluation (eval, laplace), samplers (sample-cpf, gw) and the verification
// battery (verify-*, suite).
//
// Exit codes: 0 success / all rows pass; 2 input or validation failure;
// 3 experiment failure (some row outside its band); 64 usage error.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "umcalc/budget.hpp"
#include "umcalc/dendrogram.hpp"
#include "umcalc/experiments.hpp"
#include "umcalc/io.hpp"
#include "umcalc/polynomials.hpp"
#include "umcalc/random_forests.hpp"
#include "umcalc/report.hpp"
#include "umcalc/rng.hpp"
#include "umcalc/semigroup.hpp"

namespace {

using nlohmann::json;
using namespace umcalc;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitExperiment = 3;
constexpr int kExitUsage = 64;

void write_text(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    throw std::invalid_argument("cannot write " + out_path);
  }
  out << text;
}

std::string dump_doc(const json& doc) { return doc.dump(2) + "\n"; }

json tree_doc(const Dendrogram& d) { return dendrogram_to_json(d); }

/// Jump-law file: JSON array of {"weight": w, "tree": <tree document>}.
std::vector<LevyAtom> load_jump_law(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::invalid_argument("cannot open " + path);
  }
  const json doc = json::parse(in);
  if (!doc.is_array() || doc.empty()) {
    throw std::invalid_argument("jump-law file must be a non-empty array");
  }
  std::vector<LevyAtom> atoms;
  for (const json& entry : doc) {
    if (!entry.is_object() || !entry.contains("weight") || !entry.contains("tree")) {
      throw std::invalid_argument("jump-law entries carry weight and tree");
    }
    atoms.push_back({entry.at("weight").get<double>(),
                     dendrogram_from_json(entry.at("tree"))});
  }
  return atoms;
}

LevyModel build_model(double theta, double depth, const std::string& atoms_path) {
  if (atoms_path.empty()) {
    LevyModel demo = demo_jump_law(theta);
    if (Height::of(depth) != demo.depth()) {
      return LevyModel(theta, Height::of(depth), demo.atoms());
    }
    return demo;
  }
  return LevyModel(theta, Height::of(depth), load_jump_law(atoms_path));
}

MonomialSpec build_spec(const std::string& phi, std::size_t order, double h) {
  MonomialSpec spec = basis_monomial(phi, order);
  if (h > 0.0) {
    spec = spec.with_depth(Height::of(h));
  }
  return spec;
}

int emit_report(const ExperimentReport& report, const std::string& out_path,
                const std::string& format) {
  std::cout << report.to_text();
  if (!out_path.empty()) {
    if (format == "csv") {
      write_text(out_path, report.to_csv());
    } else {
      write_text(out_path, dump_doc(report.to_json()));
    }
  }
  return report.passed() ? kExitOk : kExitExperiment;
}

std::string fmt12(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return std::string(buf);
}

/// Subcommands take "--help" only, freeing "--h" for the depth parameter.
CLI::App* add_command(CLI::App& app, const std::string& name, const std::string& desc) {
  CLI::App* cmd = app.add_subcommand(name, desc);
  cmd->set_help_flag("--help", "print this help message and exit");
  return cmd;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Calculator for ultrametric measure spaces: semigroup operations,"
               " polynomial analytics and seeded verification experiments."};
  app.require_subcommand(1);

  // ---- document commands ------------------------------------------------
  std::vector<std::string> files;
  std::string out_path;
  std::string format = "doc";
  double h_value = 0.0;

  CLI::App* validate_cmd =
      add_command(app, "validate", "Check documents for well-formedness and normal form");
  validate_cmd->add_option("files", files, "tree documents")->required()->expected(-1);

  CLI::App* canon_cmd = add_command(app, "canon", "Rewrite a document in canonical form");
  canon_cmd->add_option("file", files, "tree document")->required()->expected(1);
  canon_cmd->add_option("--out", out_path, "output path (default stdout)");

  CLI::App* concat_cmd =
      add_command(app, "concat", "Concatenate documents at depth h (cross distances 2h)");
  concat_cmd->add_option("--h", h_value, "depth")->required();
  concat_cmd->add_option("files", files, "tree documents")->required()->expected(-1);
  concat_cmd->add_option("--out", out_path, "output path (default stdout)");

  CLI::App* truncate_cmd =
      add_command(app, "truncate", "Cap pairwise distances at 2h");
  truncate_cmd->add_option("--h", h_value, "depth")->required();
  truncate_cmd->add_option("file", files, "tree document")->required()->expected(1);
  truncate_cmd->add_option("--out", out_path, "output path (default stdout)");

  CLI::App* decompose_cmd =
      add_command(app, "decompose", "Factor into primes (open 2h-ball components)");
  decompose_cmd->add_option("--h", h_value, "depth")->required();
  decompose_cmd->add_option("file", files, "tree document")->required()->expected(1);
  decompose_cmd->add_option("--out", out_path, "output path (default stdout)");
  decompose_cmd->add_option("--format", format, "doc | csv")
      ->check(CLI::IsMember({"doc", "csv"}));

  CLI::App* trunk_cmd = add_command(app, 
      "trunk", "Collapse primes to atoms and lower heights by 2h");
  trunk_cmd->add_option("--h", h_value, "depth")->required();
  trunk_cmd->add_option("file", files, "tree document")->required()->expected(1);
  trunk_cmd->add_option("--out", out_path, "output path (default stdout)");

  CLI::App* count_cmd = add_command(app, "count", "Number of open 2h-balls");
  count_cmd->add_option("--h", h_value, "depth")->required();
  count_cmd->add_option("file", files, "tree document")->required()->expected(1);
  count_cmd->add_option("--out", out_path, "output path (default stdout)");
  count_cmd->add_option("--format", format, "doc | csv")
      ->check(CLI::IsMember({"doc", "csv"}));

  CLI::App* path_cmd = add_command(app, 
      "fragmentation-path", "Prime masses and counts on every depth interval");
  path_cmd->add_option("file", files, "tree document")->required()->expected(1);
  path_cmd->add_option("--out", out_path, "output path (default stdout)");
  path_cmd->add_option("--format", format, "csv | doc")
      ->check(CLI::IsMember({"doc", "csv"}));

  // ---- polynomial commands ----------------------------------------------
  std::string phi_name = "one";
  std::size_t order = 1;
  std::uint64_t eval_samples = 0;
  std::uint64_t laplace_samples = 100000;
  std::uint64_t seed = 1729;
  unsigned workers = 4;
  double sigma = 3.0;
  double theta = 2.0;
  double depth = 1.0;
  std::string atoms_path;

  CLI::App* eval_cmd = add_command(app, 
      "eval", "Evaluate a monomial (exactly, or by Monte Carlo with --samples)");
  eval_cmd->add_option("--phi", phi_name,
                       "test function: one, r12, r12sq, sumr, expnegsum, prod12x13, bump:c:w")
      ->required();
  eval_cmd->add_option("--m", order, "tuple order")->required()->check(CLI::PositiveNumber);
  eval_cmd->add_option("--h", h_value, "optional truncation depth (0 = none)");
  eval_cmd->add_option("--samples", eval_samples, "Monte Carlo sample count (0 = exact)");
  eval_cmd->add_option("--seed", seed, "RNG seed for Monte Carlo");
  eval_cmd->add_option("file", files, "tree document")->required()->expected(1);
  eval_cmd->add_option("--out", out_path, "output path (default stdout)");

  CLI::App* laplace_cmd = add_command(app, 
      "laplace", "Estimate E[exp(-Phi)] under a compound Poisson forest model");
  laplace_cmd->add_option("--phi", phi_name, "test function")->capture_default_str();
  laplace_cmd->add_option("--m", order, "tuple order")->capture_default_str();
  laplace_cmd->add_option("--h", h_value, "truncation depth (0 = model depth)");
  laplace_cmd->add_option("--theta", theta, "jump intensity")->capture_default_str();
  laplace_cmd->add_option("--depth", depth, "model depth")->capture_default_str();
  laplace_cmd->add_option("--atoms", atoms_path,
                          "jump-law file (array of {weight, tree}); default built-in");
  laplace_cmd->add_option("--samples", laplace_samples, "sample count")->capture_default_str();
  laplace_cmd->add_option("--seed", seed, "RNG seed")->capture_default_str();
  laplace_cmd->add_option("--workers", workers, "worker threads")->capture_default_str();
  laplace_cmd->add_option("--out", out_path, "output path (default stdout)");

  // ---- samplers -----------------------------------------------------------
  std::uint64_t draw_count = 1;
  std::uint64_t gw_init = 1;
  double gw_rate = 1.0;
  double gw_time = 1.0;
  double gw_mass = 1.0;

  CLI::App* cpf_cmd =
      add_command(app, "sample-cpf", "Draw compound Poisson forests");
  cpf_cmd->add_option("--theta", theta, "jump intensity")->capture_default_str();
  cpf_cmd->add_option("--depth", depth, "model depth")->capture_default_str();
  cpf_cmd->add_option("--atoms", atoms_path, "jump-law file; default built-in");
  cpf_cmd->add_option("--n", draw_count, "number of draws")->capture_default_str();
  cpf_cmd->add_option("--seed", seed, "RNG seed")->capture_default_str();
  cpf_cmd->add_option("--out", out_path, "output path (default stdout)");

  CLI::App* gw_cmd = add_command(app, 
      "gw", "Genealogy of a critical binary branching run at its horizon");
  gw_cmd->add_option("--init", gw_init, "initial individuals")->capture_default_str();
  gw_cmd->add_option("--rate", gw_rate, "event rate per individual")->capture_default_str();
  gw_cmd->add_option("--t", gw_time, "time horizon")->capture_default_str();
  gw_cmd->add_option("--mass", gw_mass, "mass per individual")->capture_default_str();
  gw_cmd->add_option("--seed", seed, "RNG seed")->capture_default_str();
  gw_cmd->add_option("--out", out_path, "output path (default stdout)");

  // ---- verification ------------------------------------------------------
  unsigned n_roots = 4;
  std::uint64_t lk_samples = 100000;
  std::uint64_t root_samples = 100000;
  std::uint64_t branch_samples = 50000;
  std::uint64_t star_samples = 100000;

  auto add_common = [&](CLI::App* cmd, std::uint64_t* samples_var) {
    if (samples_var != nullptr) {
      cmd->add_option("--samples", *samples_var, "sample count")->capture_default_str();
    }
    cmd->add_option("--seed", seed, "RNG seed")->capture_default_str();
    cmd->add_option("--workers", workers, "worker threads")->capture_default_str();
    cmd->add_option("--sigma", sigma, "|z| bound for statistical rows")
        ->capture_default_str();
    cmd->add_option("--out", out_path, "report path");
    cmd->add_option("--format", format, "report format: doc | csv")
        ->check(CLI::IsMember({"doc", "csv"}));
  };

  CLI::App* vlk_cmd = add_command(app, 
      "verify-lk", "Monte Carlo Laplace transforms vs the exact compound Poisson form");
  vlk_cmd->add_option("--theta", theta, "jump intensity")->capture_default_str();
  add_common(vlk_cmd, &lk_samples);

  CLI::App* vroot_cmd = add_command(app, 
      "verify-root", "n-th root concatenation and the excursion approximant");
  vroot_cmd->add_option("--n-roots", n_roots, "number of roots")->capture_default_str();
  vroot_cmd->add_option("--theta", theta, "jump intensity")->capture_default_str();
  add_common(vroot_cmd, &root_samples);

  CLI::App* vbranch_cmd = add_command(app, 
      "verify-branching", "Branching property and the coupled subforest order");
  add_common(vbranch_cmd, &branch_samples);

  CLI::App* vstar_cmd = add_command(app, 
      "verify-star-mass", "Infinitely divisible total mass of Poisson star forests");
  add_common(vstar_cmd, &star_samples);

  CLI::App* suite_cmd =
      add_command(app, "suite", "The full verification battery (pinned corpora)");
  add_common(suite_cmd, nullptr);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (validate_cmd->parsed()) {
      bool ok = true;
      for (const std::string& file : files) {
        try {
          const Dendrogram d = read_any_tree_file(file);
          const ValidationReport report = validate(d);
          if (!report.well_formed()) {
            ok = false;
            std::cout << file << ": malformed\n" << report.to_string();
          } else if (!report.canonical()) {
            std::cout << file << ": well-formed, not in normal form\n"
                      << report.to_string();
          } else {
            std::cout << file << ": canonical\n";
          }
        } catch (const std::exception& e) {
          ok = false;
          std::cout << file << ": unreadable (" << e.what() << ")\n";
        }
      }
      return ok ? kExitOk : kExitValidation;
    }

    if (canon_cmd->parsed()) {
      write_text(out_path, dump_doc(tree_doc(canonicalize(read_any_tree_file(files[0])))));
      return kExitOk;
    }

    if (concat_cmd->parsed()) {
      std::vector<Dendrogram> parts;
      parts.reserve(files.size());
      for (const std::string& file : files) {
        parts.push_back(read_any_tree_file(file));
      }
      write_text(out_path, dump_doc(tree_doc(concat(Height::of(h_value), parts))));
      return kExitOk;
    }

    if (truncate_cmd->parsed()) {
      write_text(out_path, dump_doc(tree_doc(
                               truncate(Height::of(h_value), read_any_tree_file(files[0])))));
      return kExitOk;
    }

    if (decompose_cmd->parsed()) {
      const ForestDecomposition dec =
          decompose(Height::of(h_value), read_any_tree_file(files[0]));
      if (format == "csv") {
        std::ostringstream csv;
        csv << "index,mass,atoms,diameter\n";
        for (std::size_t i = 0; i < dec.primes.size(); ++i) {
          csv << i << ',' << fmt12(dec.primes[i].total_mass()) << ','
              << dec.primes[i].atom_count() << ','
              << fmt12(dec.primes[i].diameter().value()) << '\n';
        }
        write_text(out_path, csv.str());
      } else {
        json doc;
        doc["depth"] = dec.depth.value();
        doc["input_truncated"] = dec.input_truncated;
        doc["count"] = dec.primes.size();
        doc["primes"] = json::array();
        for (const Dendrogram& p : dec.primes) {
          doc["primes"].push_back(tree_doc(p));
        }
        write_text(out_path, dump_doc(doc));
      }
      return kExitOk;
    }

    if (trunk_cmd->parsed()) {
      write_text(out_path, dump_doc(tree_doc(
                               trunk(Height::of(h_value), read_any_tree_file(files[0])))));
      return kExitOk;
    }

    if (count_cmd->parsed()) {
      const BallCount count = count_balls(Height::of(h_value), read_any_tree_file(files[0]));
      const std::string value =
          count.infinite ? std::string("inf") : std::to_string(count.value);
      std::cout << value << '\n';
      if (!out_path.empty()) {
        if (format == "csv") {
          write_text(out_path, "h,count\n" + fmt12(h_value) + "," + value + "\n");
        } else {
          json doc;
          doc["h"] = h_value;
          if (count.infinite) {
            doc["count"] = "inf";
          } else {
            doc["count"] = count.value;
          }
          write_text(out_path, dump_doc(doc));
        }
      }
      return kExitOk;
    }

    if (path_cmd->parsed()) {
      const TopsPath path = tops_path(read_any_tree_file(files[0]));
      if (format == "doc") {
        json doc = json::array();
        for (std::size_t i = 0; i < path.interval_count(); ++i) {
          json step;
          step["h_low"] = path.interval_low(i).value();
          if (const auto high = path.interval_high(i)) {
            step["h_high"] = high->value();
          } else {
            step["h_high"] = nullptr;
          }
          step["count"] = path.summaries[i].ball_count;
          step["masses"] = path.summaries[i].masses;
          doc.push_back(std::move(step));
        }
        write_text(out_path, dump_doc(doc));
      } else {
        std::ostringstream csv;
        emit_path_csv(path, csv);
        write_text(out_path, csv.str());
      }
      return kExitOk;
    }

    if (eval_cmd->parsed()) {
      const MonomialSpec spec = build_spec(phi_name, order, h_value);
      const Dendrogram d = read_any_tree_file(files[0]);
      std::ostringstream line;
      if (eval_samples == 0) {
        line << fmt12(eval_monomial(spec, d)) << '\n';
      } else {
        const McEstimate est = eval_monomial_mc(spec, d, eval_samples, seed);
        line << fmt12(est.value) << ' ' << fmt12(est.std_error) << '\n';
      }
      write_text(out_path, line.str());
      return kExitOk;
    }

    if (laplace_cmd->parsed()) {
      const LevyModel model = build_model(theta, depth, atoms_path);
      const Height spec_depth = h_value > 0.0 ? Height::of(h_value) : model.depth();
      PolynomialSpec spec;
      spec.terms.push_back(build_spec(phi_name, order, spec_depth.value()));
      spec.name = spec.terms.front().name;
      const McEstimate est = laplace_estimate(
          [&model](std::uint64_t s) { return sample_cpf(model, s); }, spec, laplace_samples,
          seed, workers);
      std::ostringstream text;
      text << "estimate,std_error,oracle\n"
           << fmt12(est.value) << ',' << fmt12(est.std_error) << ','
           << fmt12(std::exp(-cpf_log_laplace_exact(model, spec, spec_depth))) << '\n';
      write_text(out_path, text.str());
      return kExitOk;
    }

    if (cpf_cmd->parsed()) {
      const LevyModel model = build_model(theta, depth, atoms_path);
      json doc = json::array();
      for (std::uint64_t i = 0; i < draw_count; ++i) {
        doc.push_back(tree_doc(sample_cpf(model, derive_seed(seed, i))));
      }
      write_text(out_path, dump_doc(doc));
      return kExitOk;
    }

    if (gw_cmd->parsed()) {
      const GwConfig config{gw_init, gw_rate, gw_time, gw_mass};
      write_text(out_path, dump_doc(tree_doc(gw_genealogy(config, seed))));
      return kExitOk;
    }

    const SuiteOptions options{seed, workers, sigma};

    if (vlk_cmd->parsed()) {
      return emit_report(verify_lk(theta, lk_samples, options), out_path, format);
    }
    if (vroot_cmd->parsed()) {
      return emit_report(verify_root(n_roots, theta, root_samples, options), out_path, format);
    }
    if (vbranch_cmd->parsed()) {
      return emit_report(verify_branching(branch_samples, options), out_path, format);
    }
    if (vstar_cmd->parsed()) {
      return emit_report(verify_star_mass(star_samples, options), out_path, format);
    }

    if (suite_cmd->parsed()) {
      const std::vector<ExperimentReport> reports = run_full_suite(options);
      std::size_t passed = 0;
      std::ostringstream csv;
      json doc = json::array();
      for (const ExperimentReport& report : reports) {
        std::cout << report.to_text() << '\n';
        passed += report.passed() ? 1 : 0;
        doc.push_back(report.to_json());
        csv << "# " << report.name << "\n" << report.to_csv();
      }
      std::cout << passed << "/" << reports.size() << " experiments passed\n";
      if (!out_path.empty()) {
        if (format == "csv") {
          write_text(out_path, csv.str());
        } else {
          write_text(out_path, dump_doc(doc));
        }
      }
      return passed == reports.size() ? kExitOk : kExitExperiment;
    }
  } catch (const BudgetError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }

  std::cerr << "unhandled subcommand\n";
  return kExitUsage;
}

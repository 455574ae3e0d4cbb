#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace umcalc {

/// One verified statistic: estimate against its oracle, with the z-score
/// when the comparison is statistical.
struct ReportRow {
  std::string statistic;
  double estimate = 0.0;
  std::optional<double> std_error;
  std::optional<double> oracle;
  std::optional<double> z;
  bool pass = false;
  std::string note;
};

/**
 * Outcome of one seeded experiment. Serializations carry only deterministic
 * fields, so files written for a fixed (inputs, seed, workers) are
 * byte-identical across reruns; the wall clock is reported on the console
 * only.
 */
struct ExperimentReport {
  std::string name;
  std::string config;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::vector<ReportRow> rows;
  std::vector<std::string> warnings;
  double wall_seconds = 0.0;

  bool passed() const;
  void add_exact(const std::string& statistic, bool ok, const std::string& note = "");
  void add_stat(const std::string& statistic, double estimate, double std_error, double oracle,
                double sigma, const std::string& note = "");

  nlohmann::json to_json() const;
  std::string to_csv() const;
  /// Console rendering including the wall clock.
  std::string to_text() const;
};

}  // namespace umcalc

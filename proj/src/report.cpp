#include "umcalc/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

namespace umcalc {

namespace {

std::string fmt(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return std::string(buf);
}

}  // namespace

bool ExperimentReport::passed() const {
  return std::all_of(rows.begin(), rows.end(), [](const ReportRow& r) { return r.pass; });
}

void ExperimentReport::add_exact(const std::string& statistic, bool ok, const std::string& note) {
  ReportRow row;
  row.statistic = statistic;
  row.estimate = ok ? 1.0 : 0.0;
  row.pass = ok;
  row.note = note;
  rows.push_back(std::move(row));
}

void ExperimentReport::add_stat(const std::string& statistic, double estimate, double std_error,
                                double oracle, double sigma, const std::string& note) {
  ReportRow row;
  row.statistic = statistic;
  row.estimate = estimate;
  row.std_error = std_error;
  row.oracle = oracle;
  const double z = std_error > 0 ? (estimate - oracle) / std_error
                                 : (estimate == oracle ? 0.0
                                                       : std::numeric_limits<double>::infinity());
  row.z = z;
  row.pass = std::abs(z) <= sigma;
  row.note = note;
  rows.push_back(std::move(row));
}

nlohmann::json ExperimentReport::to_json() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const ReportRow& row : rows) {
    nlohmann::json r{{"statistic", row.statistic},
                     {"estimate", row.estimate},
                     {"pass", row.pass}};
    if (row.std_error) {
      r["std_error"] = *row.std_error;
    }
    if (row.oracle) {
      r["oracle"] = *row.oracle;
    }
    if (row.z) {
      r["z"] = *row.z;
    }
    if (!row.note.empty()) {
      r["note"] = row.note;
    }
    rows_json.push_back(std::move(r));
  }
  return nlohmann::json{{"name", name},       {"config", config}, {"seed", seed},
                        {"workers", workers}, {"rows", rows_json}, {"warnings", warnings},
                        {"pass", passed()}};
}

std::string ExperimentReport::to_csv() const {
  std::ostringstream out;
  out << "statistic,estimate,std_error,oracle,z,pass,note\n";
  for (const ReportRow& row : rows) {
    out << row.statistic << "," << fmt(row.estimate) << ",";
    if (row.std_error) {
      out << fmt(*row.std_error);
    }
    out << ",";
    if (row.oracle) {
      out << fmt(*row.oracle);
    }
    out << ",";
    if (row.z) {
      out << fmt(*row.z);
    }
    out << "," << (row.pass ? "1" : "0") << "," << row.note << "\n";
  }
  return out.str();
}

std::string ExperimentReport::to_text() const {
  std::ostringstream out;
  out << name << " (seed " << seed << ", workers " << workers << ")";
  if (!config.empty()) {
    out << " " << config;
  }
  out << "\n";
  for (const ReportRow& row : rows) {
    out << "  [" << (row.pass ? "ok" : "FAIL") << "] " << row.statistic << ": estimate "
        << fmt(row.estimate);
    if (row.oracle) {
      out << ", oracle " << fmt(*row.oracle);
    }
    if (row.std_error) {
      out << ", se " << fmt(*row.std_error);
    }
    if (row.z) {
      out << ", z " << fmt(*row.z);
    }
    if (!row.note.empty()) {
      out << " (" << row.note << ")";
    }
    out << "\n";
  }
  for (const std::string& warning : warnings) {
    out << "  [warn] " << warning << "\n";
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "  %s in %.2fs\n", passed() ? "PASS" : "FAIL", wall_seconds);
  out << buf;
  return out.str();
}

}  // namespace umcalc

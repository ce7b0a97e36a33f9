#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace stratint {

inline std::string format_sig17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct ConvergenceRow {
  double m = 0.0;
  std::size_t path_index = 0;
  double sup_error = 0.0;
  double terminal_error = 0.0;
  std::int64_t runtime_ms = 0;
};

struct LevelSummary {
  double m = 0.0;
  double median_sup_error = 0.0;
  double mean_sup_error = 0.0;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;       // sorted by (m, path_index)
  std::vector<LevelSummary> summary;      // sorted by m
  double fitted_rate = 0.0;
  int fit_points_excluded = 0;
};

// Per-path rows. runtime_ms is zero unless timings were requested: wall-clock
// numbers would break byte-level reproducibility of the output.
inline void write_convergence_rows(std::ostream& os, const ConvergenceReport& report) {
  os << "m,path_index,sup_error,terminal_error,runtime_ms\n";
  for (const ConvergenceRow& r : report.rows) {
    os << format_sig17(r.m) << ',' << r.path_index << ','
       << format_sig17(r.sup_error) << ',' << format_sig17(r.terminal_error) << ','
       << r.runtime_ms << '\n';
  }
}

inline void write_convergence_summary(std::ostream& os,
                                      const ConvergenceReport& report) {
  os << "m,median_sup_error,mean_sup_error\n";
  for (const LevelSummary& s : report.summary) {
    os << format_sig17(s.m) << ',' << format_sig17(s.median_sup_error) << ','
       << format_sig17(s.mean_sup_error) << '\n';
  }
  os << "# fitted_rate=" << format_sig17(report.fitted_rate) << '\n';
}

inline void write_file(const std::string& path,
                       const std::function<void(std::ostream&)>& writer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file " + path);
  writer(out);
  if (!out) throw std::runtime_error("failed writing " + path);
}

// "name.csv" -> "name.summary.csv"; no extension appends ".summary".
inline std::string summary_path(const std::string& rows_path) {
  const std::size_t dot = rows_path.find_last_of('.');
  const std::size_t slash = rows_path.find_last_of("/\\");
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return rows_path + ".summary";
  return rows_path.substr(0, dot) + ".summary" + rows_path.substr(dot);
}

}  // namespace stratint

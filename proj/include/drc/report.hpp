#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "drc/metrics.hpp"
#include "drc/model.hpp"

namespace drc {

/// Result of one (method, n, T, L, run, grid point) evaluation.
struct CellResult {
  Method method = Method::kDrc;
  int n = 0;
  int T = 0;
  int L = 0;
  int run = 0;
  std::uint64_t seed = 0;
  int grid_index = 0;
  double t = 0.0;
  double delta = 0.0;
  /// Empty when the cell failed; `failure` then holds the reason.
  std::optional<ErrorRecord> record;
  std::string failure;
};

/// Mean and sample standard deviation of one statistic for one
/// (method, n, T, L) group.
struct ReportRow {
  Method method = Method::kDrc;
  int n = 0;
  int T = 0;
  int L = 0;
  std::string statistic;
  double mean = 0.0;
  double stddev = 0.0;
  std::size_t count = 0;
  std::size_t failed = 0;
};

struct ExperimentReport {
  /// Effective configuration as ordered key/value pairs.
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<CellResult> cells;

  /// Rows sorted by (method, n, T, L, statistic).
  std::vector<ReportRow> aggregate() const;
};

}  // namespace drc

#pragma once

// Dataset persistence, match-result ingestion and report emission.

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "drc/model.hpp"
#include "drc/report.hpp"

namespace drc {

struct MatchData {
  ComparisonDataset data;
  /// names[i] is the team with index i.
  std::vector<std::string> names;
  std::string season;
};

/// Reads a CSV with header `season,round,team_i,team_j,winner`. The winner
/// column holds `i`, `j` or one of the two team names. Round r of R maps to
/// grid point (r - 1) / (R - 1); repeated meetings of a pair within a round
/// are merged into one win fraction. Team indices follow first appearance.
/// When the file holds several seasons, `season` must pick one.
MatchData load_matches(const std::filesystem::path& path,
                       const std::optional<std::string>& season = std::nullopt);
MatchData parse_matches(const std::string& text,
                        const std::optional<std::string>& season = std::nullopt);

/// Re-indexes teams in ascending name order.
MatchData canonicalize_by_name(const MatchData& matches);

/// Reference ranks as (name, rank) from a `name,rank` CSV.
std::vector<std::pair<std::string, int>> load_reference_ranks(
    const std::filesystem::path& path);

inline constexpr int kDatasetFormatVersion = 1;

std::string serialize_dataset(const ComparisonDataset& ds, const GroundTruth* truth);
std::pair<ComparisonDataset, std::optional<GroundTruth>> parse_dataset(
    const std::string& text);

void save_dataset(const ComparisonDataset& ds, const GroundTruth* truth,
                  const std::filesystem::path& path);
std::pair<ComparisonDataset, std::optional<GroundTruth>> load_dataset(
    const std::filesystem::path& path);

enum class ReportFormat { kCsv, kJson };

ReportFormat parse_report_format(const std::string& text);

std::string format_report(const ExperimentReport& report, ReportFormat format);
void emit_report(const ExperimentReport& report, const std::filesystem::path& path,
                 ReportFormat format);
/// Per-cell CSV dump.
std::string format_cells(const ExperimentReport& report);

/// Shortest decimal string that parses back to exactly `value`.
std::string format_real(double value);
double parse_real(const std::string& text);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace drc

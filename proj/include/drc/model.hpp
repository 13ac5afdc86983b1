#pragma once

// Core domain types: time grid, comparison data, ground truth, estimates.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace drc {

/// Estimation methods compared throughout.
enum class Method { kDrc, kMle, kBorda };

std::string to_string(Method method);
/// Parses "drc", "mle" or "borda".
Method parse_method(std::string_view text);

/// Uniform grid {i/T : i = 0..T} on [0, 1]. T = 0 is the static case (one
/// point at t = 0).
class TimeGrid {
 public:
  explicit TimeGrid(int intervals);

  int intervals() const { return intervals_; }
  std::size_t size() const { return static_cast<std::size_t>(intervals_) + 1; }
  double point(int index) const;
  std::vector<double> points() const;

  bool operator==(const TimeGrid&) const = default;

 private:
  int intervals_;
};

/// Aggregated outcome of the comparisons of one pair at one grid point.
/// Stored with i < j; `wins` counts how often j beat i, so y_ij = wins/trials
/// and y_ji = 1 - y_ij.
struct Comparison {
  int i = 0;
  int j = 0;
  int wins = 0;
  int trials = 0;

  double y() const { return static_cast<double>(wins) / trials; }
  /// Win fraction of `winner` against the other endpoint.
  double fraction_won_by(int winner) const;

  bool operator==(const Comparison&) const = default;
};

/// Timestamped pairwise comparisons on a fixed item set. Immutable once
/// built; use ComparisonDataset::Builder to assemble one.
class ComparisonDataset {
 public:
  class Builder;

  int n() const { return n_; }
  const TimeGrid& grid() const { return grid_; }
  int intervals() const { return grid_.intervals(); }
  /// Nominal comparisons per edge (the maximum trial count when it varies).
  int comparisons_per_edge() const { return L_; }

  std::span<const Comparison> at(int grid_index) const;
  std::size_t num_records() const;

  /// Copy of this dataset with one record removed.
  ComparisonDataset without(int grid_index, std::size_t record) const;

  bool operator==(const ComparisonDataset&) const = default;

 private:
  ComparisonDataset(int n, TimeGrid grid, int L)
      : n_(n), grid_(grid), L_(L), records_(grid.size()) {}

  int n_;
  TimeGrid grid_;
  int L_;
  // records_[k] sorted by (i, j), no duplicate pairs.
  std::vector<std::vector<Comparison>> records_;
};

class ComparisonDataset::Builder {
 public:
  /// `L` = 0 means "infer from the largest trial count" (1 if empty).
  Builder(int n, int intervals, int L = 0);

  /// Records that j beat i `wins` times out of `trials` at grid point `k`.
  /// Either orientation is accepted; repeated pairs at the same grid point
  /// are merged by adding counts.
  Builder& add(int k, int i, int j, int wins, int trials);

  ComparisonDataset build() const;

 private:
  int n_;
  TimeGrid grid_;
  int L_;
  std::vector<std::vector<Comparison>> records_;
};

/// Positive latent strengths w*_{t', i}; row k is grid point k.
struct GroundTruth {
  Eigen::MatrixXd weights;
  /// Largest |y*_ij(t'+1/T) - y*_ij(t')| * T over pairs and steps, when known.
  std::optional<double> lipschitz;
  /// Edge probabilities p(t') of the generating graphs, when known.
  std::vector<double> edge_probability;

  int n() const { return static_cast<int>(weights.cols()); }
  int num_points() const { return static_cast<int>(weights.rows()); }

  bool operator==(const GroundTruth& other) const;
};

/// Validates positivity and finiteness of all weights.
void validate(const GroundTruth& truth);

/// Empirical Lipschitz constant of the induced win probabilities.
double lipschitz_diagnostic(const Eigen::MatrixXd& weights);

/// A probability vector over items with the induced ranking.
struct StrengthEstimate {
  double t = 0.0;
  Eigen::VectorXd pi;
  /// ranking[r] is the item at position r (best first).
  std::vector<int> ranking;
};

/// Items sorted by descending score; ties go to the smaller index.
std::vector<int> ranking_from_scores(const Eigen::VectorXd& scores);

/// Normalizes a nonnegative vector to unit l1 norm and attaches the ranking.
StrengthEstimate make_estimate(double t, Eigen::VectorXd pi);

/// w*_{t'} / ||w*_{t'}||_1 at grid point `grid_index`.
StrengthEstimate normalized_truth(const GroundTruth& truth, int grid_index);

/// Dynamic range max_{i,j} w*_i / w*_j at grid point `grid_index`.
double condition_number_b(const GroundTruth& truth, int grid_index);

}  // namespace drc

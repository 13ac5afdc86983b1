#include "drc/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "drc/error.hpp"

namespace drc {

std::string to_string(Method method) {
  switch (method) {
    case Method::kDrc:
      return "drc";
    case Method::kMle:
      return "mle";
    case Method::kBorda:
      return "borda";
  }
  return "unknown";
}

Method parse_method(std::string_view text) {
  if (text == "drc") return Method::kDrc;
  if (text == "mle") return Method::kMle;
  if (text == "borda") return Method::kBorda;
  throw config_error("unknown method '" + std::string(text) + "' (drc, mle, borda)");
}

TimeGrid::TimeGrid(int intervals) : intervals_(intervals) {
  if (intervals < 0) throw config_error("time grid needs T >= 0");
}

double TimeGrid::point(int index) const {
  if (index < 0 || index > intervals_) {
    throw config_error("grid index " + std::to_string(index) +
                       " outside [0, " + std::to_string(intervals_) + "]");
  }
  if (intervals_ == 0) return 0.0;
  return static_cast<double>(index) / intervals_;
}

std::vector<double> TimeGrid::points() const {
  std::vector<double> out(size());
  for (int k = 0; k <= intervals_; ++k) out[k] = point(k);
  return out;
}

double Comparison::fraction_won_by(int winner) const {
  if (winner == j) return y();
  return static_cast<double>(trials - wins) / trials;
}

std::span<const Comparison> ComparisonDataset::at(int grid_index) const {
  if (grid_index < 0 || grid_index > grid_.intervals()) {
    throw config_error("grid index " + std::to_string(grid_index) +
                       " out of range");
  }
  return records_[grid_index];
}

std::size_t ComparisonDataset::num_records() const {
  std::size_t total = 0;
  for (const auto& r : records_) total += r.size();
  return total;
}

ComparisonDataset ComparisonDataset::without(int grid_index,
                                             std::size_t record) const {
  if (grid_index < 0 || grid_index > grid_.intervals() ||
      record >= records_[grid_index].size()) {
    throw config_error("no such record to remove");
  }
  ComparisonDataset copy = *this;
  auto& row = copy.records_[grid_index];
  row.erase(row.begin() + static_cast<std::ptrdiff_t>(record));
  return copy;
}

ComparisonDataset::Builder::Builder(int n, int intervals, int L)
    : n_(n), grid_(intervals), L_(L), records_(grid_.size()) {
  if (n < 1) throw config_error("dataset needs n >= 1");
  if (L < 0) throw config_error("comparisons per edge must be positive");
}

ComparisonDataset::Builder& ComparisonDataset::Builder::add(int k, int i, int j,
                                                            int wins,
                                                            int trials) {
  if (k < 0 || k > grid_.intervals()) {
    throw data_error("grid index " + std::to_string(k) + " out of range");
  }
  if (i < 0 || j < 0 || i >= n_ || j >= n_) {
    throw data_error("item index out of range");
  }
  if (i == j) throw data_error("self-comparison of item " + std::to_string(i));
  if (trials < 1 || wins < 0 || wins > trials) {
    throw data_error("win count must lie in [0, trials] with trials >= 1");
  }
  if (i > j) {
    std::swap(i, j);
    wins = trials - wins;
  }
  auto& row = records_[k];
  auto it = std::find_if(row.begin(), row.end(), [&](const Comparison& c) {
    return c.i == i && c.j == j;
  });
  if (it == row.end()) {
    row.push_back({i, j, wins, trials});
  } else {
    it->wins += wins;
    it->trials += trials;
  }
  return *this;
}

ComparisonDataset ComparisonDataset::Builder::build() const {
  int L = L_;
  if (L == 0) {
    L = 1;
    for (const auto& row : records_)
      for (const auto& c : row) L = std::max(L, c.trials);
  }
  ComparisonDataset ds(n_, grid_, L);
  ds.records_ = records_;
  for (auto& row : ds.records_) {
    std::sort(row.begin(), row.end(), [](const Comparison& a, const Comparison& b) {
      return a.i != b.i ? a.i < b.i : a.j < b.j;
    });
  }
  return ds;
}

bool GroundTruth::operator==(const GroundTruth& other) const {
  return weights.rows() == other.weights.rows() &&
         weights.cols() == other.weights.cols() && weights == other.weights &&
         lipschitz == other.lipschitz &&
         edge_probability == other.edge_probability;
}

void validate(const GroundTruth& truth) {
  if (truth.weights.size() == 0) throw data_error("empty ground truth");
  for (Eigen::Index r = 0; r < truth.weights.rows(); ++r) {
    for (Eigen::Index c = 0; c < truth.weights.cols(); ++c) {
      const double w = truth.weights(r, c);
      if (!(w > 0.0) || !std::isfinite(w)) {
        throw data_error("ground-truth weights must be positive and finite");
      }
    }
  }
}

double lipschitz_diagnostic(const Eigen::MatrixXd& weights) {
  const Eigen::Index points = weights.rows();
  const Eigen::Index n = weights.cols();
  if (points < 2) return 0.0;
  const double T = static_cast<double>(points - 1);
  double worst = 0.0;
  for (Eigen::Index k = 0; k + 1 < points; ++k) {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const double a = weights(k, j) / (weights(k, i) + weights(k, j));
        const double b = weights(k + 1, j) / (weights(k + 1, i) + weights(k + 1, j));
        worst = std::max(worst, std::abs(b - a) * T);
      }
    }
  }
  return worst;
}

std::vector<int> ranking_from_scores(const Eigen::VectorXd& scores) {
  std::vector<int> order(static_cast<std::size_t>(scores.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return scores(a) > scores(b); });
  return order;
}

StrengthEstimate make_estimate(double t, Eigen::VectorXd pi) {
  const double total = pi.sum();
  if (!(total > 0.0)) throw estimation_error("strength vector sums to zero");
  pi /= total;
  StrengthEstimate est;
  est.t = t;
  est.ranking = ranking_from_scores(pi);
  est.pi = std::move(pi);
  return est;
}

namespace {

Eigen::VectorXd truth_row(const GroundTruth& truth, int grid_index) {
  if (grid_index < 0 || grid_index >= truth.num_points()) {
    throw config_error("grid index " + std::to_string(grid_index) +
                       " out of range for ground truth");
  }
  Eigen::VectorXd row = truth.weights.row(grid_index).transpose();
  for (Eigen::Index i = 0; i < row.size(); ++i) {
    if (!(row(i) > 0.0) || !std::isfinite(row(i))) {
      throw data_error("nonpositive weight in ground truth");
    }
  }
  return row;
}

}  // namespace

StrengthEstimate normalized_truth(const GroundTruth& truth, int grid_index) {
  const double T = truth.num_points() - 1;
  const double t = T > 0 ? grid_index / T : 0.0;
  return make_estimate(t, truth_row(truth, grid_index));
}

double condition_number_b(const GroundTruth& truth, int grid_index) {
  const Eigen::VectorXd row = truth_row(truth, grid_index);
  return row.maxCoeff() / row.minCoeff();
}

}  // namespace drc

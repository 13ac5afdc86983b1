#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "drc/model.hpp"

namespace drc {

struct ErrorRecord {
  double t = 0.0;
  Method method = Method::kDrc;
  double d_metric = 0.0;
  /// Absent for methods that only produce a ranking.
  std::optional<double> rel_l2;
  std::optional<double> rel_linf;
  std::optional<int> top_k_overlap;
};

/// positions[i] = rank position of item i (0 = best) for a ranking listing
/// items best first.
std::vector<int> rank_positions(const std::vector<int>& ranking);

/// Ranking discrepancy: sqrt(sum over misordered pairs of (pi*_i - pi*_j)^2
/// / (2 n ||pi*||^2)). A pair is misordered when the item with the larger
/// true strength sits at a worse position.
double d_metric(const Eigen::VectorXd& pi_star, const std::vector<int>& ranking);

double rel_l2(const Eigen::VectorXd& pi_star, const Eigen::VectorXd& pi_hat);
double rel_linf(const Eigen::VectorXd& pi_star, const Eigen::VectorXd& pi_hat);

/// Number of items shared by the first k entries of two rankings.
int top_k_overlap(const std::vector<int>& a, const std::vector<int>& b, int k);

/// Full record for an estimate against the truth. `has_weights` = false
/// leaves the relative errors empty (rank-only methods).
ErrorRecord evaluate(Method method, const StrengthEstimate& truth,
                     const StrengthEstimate& estimate, bool has_weights = true,
                     std::optional<int> top_k = std::nullopt);

}  // namespace drc

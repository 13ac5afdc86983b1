#pragma once

// Comparison methods: dynamic Borda count and the kernel-smoothed
// maximum-likelihood BTL estimator.

#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "drc/model.hpp"

namespace drc {

struct BordaResult {
  double t = 0.0;
  /// Win rate of each item over the neighborhood, in [0, 1].
  Eigen::VectorXd scores;
  std::vector<int> ranking;
  /// Items never compared within the neighborhood (scored 0).
  std::vector<int> uncompared;
};

BordaResult borda_scores(const ComparisonDataset& ds, double t, double delta);

/// Win rates normalized to a probability vector (for pairwise predictions).
StrengthEstimate borda_estimate(const ComparisonDataset& ds, double t, double delta);

enum class Kernel { kBoxcar, kEpanechnikov };

Kernel parse_kernel(std::string_view text);

/// Unnormalized kernel weight of grid point tp for query t with bandwidth h:
/// boxcar 1{|u| <= 1}, Epanechnikov 3/4 (1 - u^2) on |u| < 1, u = (tp - t)/h.
double kernel_weight(Kernel kernel, double tp, double t, double h);

struct SmoothedCounts {
  /// wins(i, j): kernel-weighted number of times i beat j. Zero diagonal.
  Eigen::MatrixXd wins;
  double h = 0.0;
  Kernel kernel = Kernel::kBoxcar;
};

SmoothedCounts smooth_counts(const ComparisonDataset& ds, double t, double h,
                             Kernel kernel = Kernel::kBoxcar);

/// Normalized negative log-likelihood
/// sum_{i != j} X_ij log(1 + exp(b_j - b_i)) / sum X_ij.
double mle_objective(const Eigen::MatrixXd& wins, const Eigen::VectorXd& beta);
Eigen::VectorXd mle_gradient(const Eigen::MatrixXd& wins, const Eigen::VectorXd& beta);

/// Whether the directed graph with an arc i -> j for every positive X_ij is
/// strongly connected.
bool strongly_connected(const Eigen::MatrixXd& wins);

struct MleOptions {
  double step = 1.0;
  int max_iterations = 100000;
  double tolerance = 1e-8;
};

struct MleResult {
  StrengthEstimate estimate;
  Eigen::VectorXd beta;
  int iterations = 0;
  double objective = 0.0;
};

/// Projected gradient descent with backtracking on the zero-sum subspace.
MleResult mle_fit(const SmoothedCounts& counts, const MleOptions& options = {},
                  std::optional<Eigen::VectorXd> initial = std::nullopt, double t = 0.0);

/// Boxcar smoothing with h = delta / T followed by mle_fit.
MleResult mle_estimate(const ComparisonDataset& ds, double t, double delta,
                       const MleOptions& options = {});

}  // namespace drc

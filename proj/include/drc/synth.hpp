#pragma once

// Synthetic dynamic-BTL data: Gaussian-process log-strengths, Erdos-Renyi
// comparison graphs and Bernoulli outcomes.

#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "drc/model.hpp"

namespace drc {

struct SynthConfig {
  int n = 10;
  int intervals = 10;  // T
  int L = 5;
  double p_lo = 0.1;
  double p_hi = 0.1;
  /// Standard deviation of the GP mean entries (variance 0.1).
  double gp_mean_std = std::sqrt(0.1);
  std::uint64_t seed = 0;
  bool ensure_union_connected = true;
  int max_graph_retries = 100;

  void validate() const;
  /// p_range = [1/n, log(n)/n].
  static SynthConfig sparse_default(int n, int intervals, int L, std::uint64_t seed);
};

struct SynthData {
  ComparisonDataset data;
  GroundTruth truth;
  /// Graph resamples needed to reach a connected full-grid union graph.
  int graph_retries = 0;
};

/// Toeplitz covariance with first row 1 - k / (T + 1), k = 0..T.
Eigen::MatrixXd gp_covariance(int intervals);

/// Lower Cholesky factor of `cov`, adding jitter 1e-10 * I escalated x10 up to
/// 1e-6 if the plain factorization fails.
Eigen::MatrixXd cholesky_with_jitter(const Eigen::MatrixXd& cov);

/// Strengths exp(GP path): row k = grid point, column i = item.
Eigen::MatrixXd sample_gp_weights(int n, int intervals, double mean_std,
                                  std::uint64_t seed);

SynthData generate(const SynthConfig& cfg);

/// Time-constant weights with G(n, p) graphs at every grid point.
SynthData make_constant_weights(int n, int intervals, int L,
                                const std::vector<double>& weights, double p,
                                std::uint64_t seed, bool ensure_union_connected = true);

/// Outcomes equal to the exact win probabilities: for integer weights the
/// pair (i, j) records w_j wins out of w_i + w_j trials.
SynthData make_noiseless(int n, int intervals, const std::vector<int>& weights,
                         double p, std::uint64_t seed);

/// Round-robin season of `rounds` rounds in which item i beats item j
/// whenever i < j.
ComparisonDataset make_dominance_season(int n, int rounds);

}  // namespace drc

#pragma once

// Small dataset builders and independent oracles shared by the unit tests.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "drc/model.hpp"
#include "drc/rng.hpp"
#include "drc/spectral.hpp"

namespace drc::testing {

/// Random dataset: each pair compared at each grid point with probability p.
inline ComparisonDataset random_dataset(int n, int T, int L, double p, std::uint64_t seed) {
  Rng rng(seed);
  ComparisonDataset::Builder b(n, T, L);
  for (int k = 0; k <= T; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (!rng.bernoulli(p)) continue;
        const int wins = static_cast<int>(rng.below(static_cast<std::uint64_t>(L) + 1));
        // Random storage orientation.
        if (rng.bernoulli(0.5)) {
          b.add(k, i, j, wins, L);
        } else {
          b.add(k, j, i, L - wins, L);
        }
      }
    }
  }
  return b.build();
}

/// Stationary distribution by dense eigendecomposition of P^T: the
/// eigenvector whose eigenvalue is closest to 1, normalized to sum one.
inline Eigen::VectorXd eigen_stationary(const Eigen::MatrixXd& P) {
  Eigen::EigenSolver<Eigen::MatrixXd> solver(P.transpose());
  const auto values = solver.eigenvalues();
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < values.size(); ++k) {
    if (std::abs(values(k) - 1.0) < std::abs(values(best) - 1.0)) best = k;
  }
  Eigen::VectorXd v = solver.eigenvectors().col(best).real();
  return v / v.sum();
}

}  // namespace drc::testing

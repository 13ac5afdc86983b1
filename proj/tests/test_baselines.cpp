#include <cmath>

#include <boost/multiprecision/cpp_dec_float.hpp>

#include "doctest.h"
#include "drc/baselines.hpp"
#include "drc/error.hpp"
#include "drc/synth.hpp"
#include "fixtures.hpp"

using namespace drc;

namespace {

ComparisonDataset flipped(const ComparisonDataset& ds) {
  ComparisonDataset::Builder b(ds.n(), ds.intervals(), ds.comparisons_per_edge());
  for (int k = 0; k <= ds.intervals(); ++k) {
    for (const auto& c : ds.at(k)) b.add(k, c.j, c.i, c.trials - c.wins, c.trials);
  }
  return b.build();
}

// Damped Newton on the full parameter vector with beta_0 pinned at zero.
Eigen::VectorXd newton_oracle(const Eigen::MatrixXd& X) {
  const int n = static_cast<int>(X.rows());
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(n);
  for (int it = 0; it < 200; ++it) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        const double s = 1.0 / (1.0 + std::exp(beta(i) - beta(j)));
        const double c = X(i, j) * s * (1.0 - s);
        g(j) += X(i, j) * s;
        g(i) -= X(i, j) * s;
        H(i, i) += c;
        H(j, j) += c;
        H(i, j) -= c;
        H(j, i) -= c;
      }
    }
    const int m = n - 1;
    const Eigen::VectorXd step =
        H.bottomRightCorner(m, m).ldlt().solve(g.tail(m));
    beta.tail(m) -= step;
    if (step.lpNorm<Eigen::Infinity>() < 1e-15) break;
  }
  return beta;
}

}  // namespace

TEST_CASE("Borda examples") {
  SUBCASE("an unbeaten item scores 1") {
    const auto ds = make_dominance_season(4, 3);
    const auto b = borda_scores(ds, 0.5, 2.0);
    CHECK(b.scores(0) == 1.0);
    CHECK(b.scores(3) == 0.0);
    CHECK(b.ranking == std::vector<int>{0, 1, 2, 3});
    CHECK(b.uncompared.empty());
  }
  SUBCASE("even split ties by index") {
    ComparisonDataset::Builder builder(2, 0, 2);
    builder.add(0, 0, 1, 1, 2);
    const auto b = borda_scores(builder.build(), 0.0, 0.5);
    CHECK(b.scores(0) == 0.5);
    CHECK(b.scores(1) == 0.5);
    CHECK(b.ranking == std::vector<int>{0, 1});
  }
  SUBCASE("uncompared items are flagged") {
    ComparisonDataset::Builder builder(3, 4, 1);
    builder.add(0, 0, 1, 1, 1).add(4, 1, 2, 0, 1);
    const auto b = borda_scores(builder.build(), 0.0, 1.0);
    CHECK(b.uncompared == std::vector<int>{2});
    CHECK(b.scores(2) == 0.0);
    CHECK(b.scores(1) == 1.0);
  }
}

TEST_CASE("Borda matches a full-scan tally") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const auto ds = testing::random_dataset(7, 12, 4, 0.4, seed);
    const double t = (seed % 13) / 12.0;
    const double delta = 0.5 + seed % 6;
    std::vector<double> wins(7, 0.0), games(7, 0.0);
    for (int k = 0; k <= 12; ++k) {
      if (std::abs(k / 12.0 - t) > delta / 12.0 + 1e-12) continue;
      for (const auto& c : ds.at(k)) {
        for (int trial = 0; trial < c.trials; ++trial) {
          const int winner = trial < c.wins ? c.j : c.i;
          wins[winner] += 1;
          games[c.i] += 1;
          games[c.j] += 1;
        }
      }
    }
    const auto b = borda_scores(ds, t, delta);
    const auto f = borda_scores(flipped(ds), t, delta);
    for (int i = 0; i < 7; ++i) {
      CHECK(b.scores(i) == doctest::Approx(games[i] > 0 ? wins[i] / games[i] : 0.0)
                               .epsilon(1e-14));
    }
    CHECK(b.scores == f.scores);
    CHECK(b.ranking == f.ranking);
    const auto est = borda_estimate(ds, t, delta);
    if (b.scores.sum() > 0) CHECK(std::abs(est.pi.sum() - 1.0) <= 1e-12);
  }
}

TEST_CASE("kernel weights") {
  CHECK(kernel_weight(Kernel::kBoxcar, 0.3, 0.3, 0.1) == 1.0);
  CHECK(kernel_weight(Kernel::kBoxcar, 0.4, 0.3, 0.1) == 1.0);
  CHECK(kernel_weight(Kernel::kBoxcar, 0.41, 0.3, 0.1) == 0.0);
  CHECK(kernel_weight(Kernel::kEpanechnikov, 0.5, 0.5, 0.2) == 0.75);
  CHECK(kernel_weight(Kernel::kEpanechnikov, 0.6, 0.5, 0.2) == doctest::Approx(0.5625));
  CHECK(kernel_weight(Kernel::kEpanechnikov, 0.7, 0.5, 0.2) == 0.0);
  CHECK(parse_kernel("epanechnikov") == Kernel::kEpanechnikov);
  CHECK_THROWS_AS(parse_kernel("gaussian"), Error);
}

TEST_CASE("smoothed counts") {
  const auto ds = testing::random_dataset(5, 10, 3, 0.5, 4);
  SUBCASE("wide boxcar is the plain total") {
    Eigen::MatrixXd total = Eigen::MatrixXd::Zero(5, 5);
    for (int k = 0; k <= 10; ++k) {
      for (const auto& c : ds.at(k)) {
        total(c.i, c.j) += c.trials - c.wins;
        total(c.j, c.i) += c.wins;
      }
    }
    CHECK(smooth_counts(ds, 0.3, 1.0).wins == total);
    CHECK(smooth_counts(ds, 0.9, 5.0).wins == total);
  }
  SUBCASE("single time point") {
    ComparisonDataset::Builder b(3, 0, 4);
    b.add(0, 0, 1, 3, 4).add(0, 1, 2, 1, 4);
    const auto box = smooth_counts(b.build(), 0.0, 0.5);
    const auto epa = smooth_counts(b.build(), 0.0, 0.5, Kernel::kEpanechnikov);
    CHECK(box.wins(0, 1) == 1.0);
    CHECK(box.wins(1, 0) == 3.0);
    CHECK(box.wins(1, 2) == 3.0);
    CHECK(epa.wins == 0.75 * box.wins);
  }
  SUBCASE("invariants") {
    for (double h : {0.05, 0.2, 0.7}) {
      for (Kernel kern : {Kernel::kBoxcar, Kernel::kEpanechnikov}) {
        const auto s = smooth_counts(ds, 0.5, h, kern);
        CHECK(s.wins.diagonal().isZero(0.0));
        CHECK(s.wins.minCoeff() >= 0.0);
      }
    }
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(smooth_counts(ds, 0.5, 0.0), Error);
    // No grid point strictly inside the support.
    CHECK_THROWS_AS(smooth_counts(ds, 0.05, 0.05, Kernel::kEpanechnikov), Error);
  }
}

TEST_CASE("Epanechnikov weight sum on an interior window") {
  using Big = boost::multiprecision::cpp_dec_float_50;
  const int T = 200;
  for (int m : {2, 3, 5, 10, 40}) {
    for (int k0 : {m + 1, 100, T - m - 1}) {
      double sum = 0.0;
      for (int k = 0; k <= T; ++k) {
        sum += kernel_weight(Kernel::kEpanechnikov, double(k) / T, double(k0) / T,
                             double(m) / T);
      }
      const Big bm(m);
      const Big expected =
          Big(3) / 4 * ((2 * bm - 1) - (bm - 1) * bm * (2 * bm - 1) / (3 * bm * bm));
      CHECK(sum == doctest::Approx(expected.convert_to<double>()).epsilon(1e-12));
    }
  }
}

TEST_CASE("MLE objective and gradient") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(6));
    Eigen::MatrixXd X(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) X(i, j) = i == j ? 0.0 : rng.uniform(0.0, 5.0);
    Eigen::VectorXd beta(n);
    for (int i = 0; i < n; ++i) beta(i) = rng.normal();
    const Eigen::VectorXd g = mle_gradient(X, beta);
    for (int i = 0; i < n; ++i) {
      const double h = 1e-5;
      Eigen::VectorXd up = beta, down = beta;
      up(i) += h;
      down(i) -= h;
      const double fd = (mle_objective(X, up) - mle_objective(X, down)) / (2 * h);
      CHECK(g(i) == doctest::Approx(fd).epsilon(1e-5).scale(1e-6));
    }
    // Constant shifts leave the objective unchanged.
    CHECK(mle_objective(X, beta.array() + 2.5) ==
          doctest::Approx(mle_objective(X, beta)).epsilon(1e-12));
  }
}

TEST_CASE("strong connectivity") {
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(3, 3);
  X(0, 1) = X(1, 2) = 1;
  CHECK_FALSE(strongly_connected(X));
  X(2, 0) = 1;
  CHECK(strongly_connected(X));
  SmoothedCounts s;
  s.wins = Eigen::MatrixXd::Zero(3, 3);
  s.wins(0, 1) = s.wins(1, 2) = 1;
  CHECK_THROWS_AS(mle_fit(s), Error);
}

TEST_CASE("MLE examples") {
  SUBCASE("symmetric pair") {
    SmoothedCounts s;
    s.wins = Eigen::MatrixXd::Zero(2, 2);
    s.wins(0, 1) = s.wins(1, 0) = 3.0;
    const auto r = mle_fit(s);
    CHECK(r.beta.cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(r.estimate.pi(0) == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("noiseless weights (1, 2, 3)") {
    const auto data = make_noiseless(3, 4, {1, 2, 3}, 1.0, 1);
    const auto r = mle_estimate(data.data, 0.5, 4.0);
    const Eigen::Vector3d expected(1.0 / 6, 2.0 / 6, 3.0 / 6);
    CHECK((r.estimate.pi - expected).lpNorm<Eigen::Infinity>() <= 1e-6);
    CHECK(r.estimate.ranking == std::vector<int>{2, 1, 0});

    const auto counts = smooth_counts(data.data, 0.5, 1.0);
    const Eigen::VectorXd oracle = newton_oracle(counts.wins);
    Eigen::VectorXd pi = oracle.array().exp();
    pi /= pi.sum();
    CHECK((r.estimate.pi - pi).lpNorm<Eigen::Infinity>() <= 1e-6);
    CHECK((pi - expected).lpNorm<Eigen::Infinity>() <= 1e-12);
  }
  SUBCASE("random data against Newton and finite differences") {
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
      const auto ds = testing::random_dataset(6, 8, 5, 0.6, 40 + seed);
      const auto counts = smooth_counts(ds, 0.5, 1.0);
      if (!strongly_connected(counts.wins)) continue;
      const auto r = mle_fit(counts);
      CHECK(std::abs(r.beta.sum()) <= 1e-10);
      CHECK(mle_gradient(counts.wins, r.beta).lpNorm<Eigen::Infinity>() <= 1e-8);
      const Eigen::VectorXd oracle = newton_oracle(counts.wins);
      Eigen::VectorXd pi = oracle.array().exp();
      pi /= pi.sum();
      CHECK((r.estimate.pi - pi).lpNorm<Eigen::Infinity>() <= 1e-6);
      CHECK(r.objective == doctest::Approx(mle_objective(counts.wins, r.beta)));
    }
  }
}

TEST_CASE("MLE is invariant to shifting the initializer") {
  const auto ds = testing::random_dataset(6, 8, 5, 0.8, 11);
  const auto counts = smooth_counts(ds, 0.5, 1.0);
  REQUIRE(strongly_connected(counts.wins));
  Eigen::VectorXd init(6);
  init << 0.3, -1.0, 0.5, 0.2, -0.4, 1.1;
  const auto a = mle_fit(counts, {}, init);
  const auto b = mle_fit(counts, {}, Eigen::VectorXd(init.array() + 7.0));
  CHECK((a.estimate.pi - b.estimate.pi).lpNorm<Eigen::Infinity>() <= 1e-10);
}

TEST_CASE("MLE non-convergence is reported") {
  const auto ds = testing::random_dataset(6, 8, 5, 0.8, 11);
  MleOptions opts;
  opts.max_iterations = 1;
  CHECK_THROWS_AS(mle_fit(smooth_counts(ds, 0.5, 1.0), opts), Error);
}

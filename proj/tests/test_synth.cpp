#include <cmath>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "drc/error.hpp"
#include "drc/spectral.hpp"
#include "drc/synth.hpp"

using namespace drc;

TEST_CASE("forced edge probability gives complete graphs") {
  SynthConfig cfg;
  cfg.n = 6;
  cfg.intervals = 4;
  cfg.p_lo = cfg.p_hi = 1.0;
  cfg.seed = 3;
  const auto out = generate(cfg);
  for (int k = 0; k <= 4; ++k) CHECK(out.data.at(k).size() == 15);
  CHECK(out.graph_retries == 0);
  CHECK(out.truth.weights.rows() == 5);
  CHECK(out.truth.weights.cols() == 6);
  CHECK(out.truth.edge_probability == std::vector<double>(5, 1.0));
}

TEST_CASE("generation is deterministic") {
  auto cfg = SynthConfig::sparse_default(20, 15, 5, 99);
  const auto a = generate(cfg);
  const auto b = generate(cfg);
  CHECK(a.data == b.data);
  CHECK(a.truth == b.truth);
  cfg.seed = 100;
  CHECK_FALSE(generate(cfg).data == a.data);
}

TEST_CASE("config validation") {
  SynthConfig cfg;
  cfg.p_lo = 0.5;
  cfg.p_hi = 0.2;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.n = 1;
  CHECK_THROWS_AS(generate(cfg), Error);
  cfg = {};
  cfg.L = 0;
  CHECK_THROWS_AS(generate(cfg), Error);
  cfg = {};
  cfg.p_hi = 1.5;
  CHECK_THROWS_AS(generate(cfg), Error);
  const auto s = SynthConfig::sparse_default(50, 10, 5, 1);
  CHECK(s.p_lo == doctest::Approx(0.02));
  CHECK(s.p_hi == doctest::Approx(std::log(50.0) / 50));
}

TEST_CASE("sampled paths and union connectivity") {
  auto cfg = SynthConfig::sparse_default(30, 20, 5, 7);
  const auto out = generate(cfg);
  CHECK(union_graph_connected(out.data, 0.5, 20.0));
  CHECK(out.truth.lipschitz.has_value());
  CHECK(std::isfinite(*out.truth.lipschitz));
  CHECK(out.truth.weights.minCoeff() > 0.0);
  for (int k = 0; k <= 20; ++k) {
    const double p = out.truth.edge_probability[k];
    CHECK(p >= cfg.p_lo);
    CHECK(p <= cfg.p_hi);
    for (const auto& c : out.data.at(k)) CHECK(c.trials == 5);
  }
  CHECK(out.truth.weights == sample_gp_weights(30, 20, cfg.gp_mean_std, cfg.seed));

  cfg = SynthConfig::sparse_default(30, 2, 5, 7);
  cfg.p_lo = cfg.p_hi = 0.001;
  cfg.max_graph_retries = 3;
  CHECK_THROWS_AS(generate(cfg), Error);
}

TEST_CASE("covariance is a valid Toeplitz kernel") {
  for (int T : {0, 1, 5, 50, 200}) {
    const auto S = gp_covariance(T);
    CHECK(S.rows() == T + 1);
    CHECK(S.isApprox(S.transpose(), 0.0));
    for (int r = 0; r <= T; ++r)
      for (int c = 0; c <= T; ++c)
        CHECK(S(r, c) == doctest::Approx(1.0 - std::abs(r - c) / double(T + 1)));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
    CHECK(es.eigenvalues().minCoeff() >= -1e-8);
    const auto Lc = cholesky_with_jitter(S);
    CHECK((Lc * Lc.transpose() - S).cwiseAbs().maxCoeff() <= 1e-6 + 1e-12);
  }
  Eigen::MatrixXd bad = -Eigen::MatrixXd::Identity(2, 2);
  CHECK_THROWS_AS(cholesky_with_jitter(bad), Error);
}

TEST_CASE("empirical win frequency matches the model") {
  const int trials = 100000;
  const std::vector<double> w{1.0, 3.0};
  int wins = 0;
  for (int s = 0; s < trials; ++s) {
    const auto d = make_constant_weights(2, 0, 1, w, 1.0, static_cast<std::uint64_t>(s));
    wins += d.data.at(0)[0].wins;
  }
  const double p = 0.75;
  const double sigma = std::sqrt(p * (1 - p) / trials);
  CHECK(std::abs(double(wins) / trials - p) <= 3 * sigma);
}

TEST_CASE("empirical edge density matches p") {
  const int trials = 1000, n = 12;
  const double p = 0.3;
  long edges = 0;
  for (int s = 0; s < trials; ++s) {
    const auto d = make_constant_weights(n, 0, 1, std::vector<double>(n, 1.0), p,
                                         static_cast<std::uint64_t>(s), false);
    edges += static_cast<long>(d.data.at(0).size());
  }
  const double m = double(trials) * n * (n - 1) / 2;
  CHECK(std::abs(edges / m - p) <= 3 * std::sqrt(p * (1 - p) / m));
}

TEST_CASE("constant weights") {
  SUBCASE("equal weights give even odds") {
    const auto d = make_constant_weights(5, 3, 2, std::vector<double>(5, 1.0), 0.5, 2);
    CHECK(*d.truth.lipschitz == 0.0);
    for (int k = 0; k <= 3; ++k) {
      const auto t = normalized_truth(d.truth, k);
      CHECK((t.pi.array() == 0.2).all());
    }
  }
  SUBCASE("condition number is the weight ratio") {
    const std::vector<double> w{0.5, 2.0, 1.0, 4.0};
    const auto d = make_constant_weights(4, 6, 1, w, 0.9, 5);
    for (int k = 0; k <= 6; ++k) CHECK(condition_number_b(d.truth, k) == 8.0);
    CHECK(*d.truth.lipschitz == 0.0);
  }
  SUBCASE("many trials concentrate") {
    const std::vector<double> w{1.0, 2.0, 0.5, 3.0, 1.5};
    const auto d = make_constant_weights(5, 0, 10000, w, 1.0, 8);
    for (const auto& c : d.data.at(0)) {
      CHECK(std::abs(c.y() - w[c.j] / (w[c.i] + w[c.j])) <= 0.02);
    }
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(make_constant_weights(3, 2, 1, {1.0, 2.0}, 0.5, 1), Error);
    CHECK_THROWS_AS(make_constant_weights(2, 2, 1, {1.0, -2.0}, 0.5, 1), Error);
  }
}

TEST_CASE("noiseless and dominance fixtures") {
  const auto d = make_noiseless(4, 3, {1, 2, 3, 4}, 1.0, 1);
  for (int k = 0; k <= 3; ++k) {
    for (const auto& c : d.data.at(k)) {
      CHECK(c.y() == doctest::Approx(double(c.j + 1) / (c.i + c.j + 2)).epsilon(1e-15));
    }
  }
  const auto s = make_dominance_season(3, 4);
  CHECK(s.intervals() == 3);
  for (int k = 0; k <= 3; ++k) {
    CHECK(s.at(k).size() == 3);
    for (const auto& c : s.at(k)) CHECK(c.wins == 0);
  }
}

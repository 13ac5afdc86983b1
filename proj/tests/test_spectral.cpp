#include <cmath>

#include "doctest.h"
#include "drc/error.hpp"
#include "drc/metrics.hpp"
#include "drc/spectral.hpp"
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

NeighborhoodView complete_view(int n) {
  ComparisonDataset::Builder b(n, 0, 1);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) b.add(0, i, j, 0, 1);
  return neighborhood(b.build(), 0.0, 0.5);
}

}  // namespace

TEST_CASE("two-state chain") {
  ComparisonDataset::Builder b(2, 0, 2);
  b.add(0, 0, 1, 1, 2);
  const auto view = neighborhood(b.build(), 0.0, 0.5);
  const auto P = build_transition(view, 2, NormalizationPolicy::max_degree(1.0));
  CHECK(P.d_norm == 1.0);
  CHECK(P.entries(0, 0) == 0.5);
  CHECK(P.entries(0, 1) == 0.5);
  CHECK(P.entries(1, 0) == 0.5);
  CHECK(P.entries(1, 1) == 0.5);
  const auto pi = stationary_distribution(P);
  CHECK(pi.pi(0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(pi.pi(1) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("truth chain satisfies detailed balance") {
  const Eigen::Vector3d w(1, 2, 3);
  const Eigen::Vector3d pi_star = w / w.sum();
  const auto P = build_truth_transition(complete_view(3), w, 2.0);
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(P.entries.row(i).sum() - 1.0) <= 1e-12);
    for (int j = 0; j < 3; ++j) {
      CHECK(std::abs(pi_star(i) * P.entries(i, j) - pi_star(j) * P.entries(j, i)) <= 1e-12);
    }
  }
  const auto est = stationary_distribution(P);
  CHECK((est.pi - pi_star).lpNorm<Eigen::Infinity>() <= 1e-8);
  CHECK((testing::eigen_stationary(P.entries) - pi_star).lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("reversibility of the truth chain on random union graphs") {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 + static_cast<int>(rng.below(8));
    const auto ds = testing::random_dataset(n, 6, 3, 0.4, 100 + trial);
    Eigen::VectorXd w(n);
    for (int i = 0; i < n; ++i) w(i) = std::exp(rng.normal());
    const auto view = neighborhood(ds, rng.uniform(), 0.5 + 6 * rng.uniform());
    if (view.edges.empty()) continue;
    const int d_max = diagnostics(view, n).d_max;
    const auto P = build_truth_transition(view, w, d_max);
    const Eigen::VectorXd pi_star = w / w.sum();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        CHECK(std::abs(pi_star(i) * P.entries(i, j) - pi_star(j) * P.entries(j, i)) <= 1e-12);
    if (diagnostics(view, n).connected) {
      CHECK((stationary_distribution(P).pi - pi_star).lpNorm<Eigen::Infinity>() <= 1e-8);
    }
  }
}

TEST_CASE("transition matrix invariants on random data") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto ds = testing::random_dataset(9, 8, 5, 0.25, seed);
    const auto view = neighborhood(ds, (seed % 9) / 8.0, 0.5 + seed % 5);
    if (view.edges.empty()) continue;
    for (const auto& policy : {NormalizationPolicy::empirical(), NormalizationPolicy::max_degree(1.0),
                               NormalizationPolicy::max_degree(2.5)}) {
      const auto P = build_transition(view, 9, policy);
      CHECK(P.d_norm >= diagnostics(view, 9).d_max);
      for (int i = 0; i < 9; ++i) {
        CHECK(std::abs(P.entries.row(i).sum() - 1.0) <= 1e-12);
        for (int j = 0; j < 9; ++j) {
          CHECK(P.entries(i, j) >= 0.0);
          if (i == j) continue;
          CHECK(P.entries(i, j) <= 1.0 / P.d_norm + 1e-15);
          if (P.entries(i, j) != 0.0) CHECK(view.find(i, j) != nullptr);
        }
      }
      // Flipping stored orientation leaves the matrix unchanged.
      const auto Q = build_transition(neighborhood(flipped(ds), view.t, view.delta), 9, policy);
      CHECK(P.entries == Q.entries);
    }
  }
}

TEST_CASE("normalization policies") {
  const auto view = complete_view(4);  // d_max = 3, 6 edges
  CHECK(NormalizationPolicy::max_degree(2.0).resolve(4, 6, 3) == 6.0);
  CHECK(NormalizationPolicy::known_p(0.5).resolve(4, 6, 3) == 6.0);
  CHECK_THROWS_AS(NormalizationPolicy::known_p(0.2).resolve(4, 6, 3), Error);
  CHECK_THROWS_AS(build_transition(view, 4, NormalizationPolicy::known_p(0.2)), Error);
  // p_hat = 1 on a complete graph gives 3 n.
  CHECK(NormalizationPolicy::empirical().resolve(4, 6, 3) == 12.0);
  // Guarded below by d_max on sparse graphs.
  CHECK(NormalizationPolicy::empirical().resolve(100, 3, 3) == 3.0);
  CHECK_THROWS_AS(NormalizationPolicy::max_degree(0.5), Error);
  CHECK_THROWS_AS(NormalizationPolicy::known_p(0.0), Error);
}

TEST_CASE("empty union graph is an explicit error") {
  ComparisonDataset::Builder b(3, 10, 1);
  b.add(10, 0, 1, 0, 1);
  const auto ds = b.build();
  CHECK_THROWS_AS(build_transition(neighborhood(ds, 0.0, 1.0), 3,
                                   NormalizationPolicy::empirical()),
                  Error);
  try {
    dynamic_rank_centrality(ds, 0.0, 1.0, NormalizationPolicy::empirical());
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kData);
    CHECK(std::string(e.what()).find("t=0") != std::string::npos);
  }
}

TEST_CASE("power iteration matches the dense eigen oracle") {
  int checked = 0;
  for (std::uint64_t seed = 0; checked < 20; ++seed) {
    const auto ds = testing::random_dataset(8, 4, 6, 0.35, 1000 + seed);
    const auto view = neighborhood(ds, 0.5, 4.0);
    if (!diagnostics(view, 8).connected) continue;
    const auto P = build_transition(view, 8, NormalizationPolicy::empirical());
    bool interior = true;
    for (const auto& e : view.edges) interior = interior && e.ybar > 0.0 && e.ybar < 1.0;
    if (!interior) continue;
    PowerIterationInfo info;
    const auto est = stationary_distribution(P, 0.5, {}, &info);
    CHECK(info.iterations >= 1);
    CHECK(std::abs(est.pi.sum() - 1.0) <= 1e-12);
    CHECK((est.pi - testing::eigen_stationary(P.entries)).lpNorm<Eigen::Infinity>() <= 1e-8);
    ++checked;
  }
}

TEST_CASE("stationary distribution errors") {
  TransitionMatrix P;
  P.entries = Eigen::MatrixXd::Identity(3, 3);
  P.entries(0, 0) = 0.5;
  P.entries(0, 1) = 0.5;
  try {
    stationary_distribution(P);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kEstimation);
    CHECK(std::string(e.what()).find("identifiable") != std::string::npos);
  }

  const auto view = complete_view(5);
  Eigen::VectorXd w(5);
  w << 1, 2, 4, 8, 16;
  const auto Q = build_truth_transition(view, w, 4.0);
  CHECK_THROWS_AS(stationary_distribution(Q, 0.0, {1e-10, 1}), Error);
}

TEST_CASE("periodic chains use the lazy walk") {
  TransitionMatrix P;
  P.entries.resize(2, 2);
  P.entries << 0, 1, 1, 0;
  PowerIterationInfo info;
  const auto est = stationary_distribution(P, 0.0, {}, &info);
  CHECK(info.lazy);
  CHECK(est.pi(0) == doctest::Approx(0.5).epsilon(1e-12));

  TransitionMatrix cycle;
  cycle.entries = Eigen::MatrixXd::Zero(4, 4);
  for (int i = 0; i < 4; ++i) {
    cycle.entries(i, (i + 1) % 4) = 0.5;
    cycle.entries(i, (i + 3) % 4) = 0.5;
  }
  const auto c = stationary_distribution(cycle, 0.0, {}, &info);
  CHECK(info.lazy);
  CHECK((c.pi - Eigen::VectorXd::Constant(4, 0.25)).lpNorm<Eigen::Infinity>() <= 1e-9);
}

TEST_CASE("static case equals Rank Centrality of the single graph") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto data = make_constant_weights(12, 0, 50, std::vector<double>(12, 1.0), 0.5, seed);
    const auto policy = NormalizationPolicy::empirical();
    const auto drc = dynamic_rank_centrality(data.data, 0.0, 0.5, policy);
    const auto rc = static_rank_centrality(data.data, 0, policy);
    CHECK(drc.pi == rc.pi);
    CHECK(drc.ranking == rc.ranking);
    // Any radius collapses to the single graph.
    CHECK(dynamic_rank_centrality(data.data, 0.0, 7.0, policy).pi == rc.pi);
  }
}

TEST_CASE("noiseless constant weights are recovered exactly") {
  const std::vector<int> w{1, 2, 3, 4, 5, 6};
  const auto data = make_noiseless(6, 10, w, 0.3, 5);
  const auto est = dynamic_rank_centrality(data.data, 0.4, 10.0, NormalizationPolicy::empirical());
  const auto truth = normalized_truth(data.truth, 4);
  CHECK(rel_l2(truth.pi, est.pi) <= 1e-8);
  CHECK(est.ranking == std::vector<int>{5, 4, 3, 2, 1, 0});
  CHECK(est.t == 0.4);
}

TEST_CASE("estimate contract on synthetic data") {
  auto cfg = SynthConfig::sparse_default(20, 50, 5, 3);
  const auto data = generate(cfg);
  const double delta = std::ceil(std::cbrt(50.0 * 50.0));
  const double d = increase_delta_until_connected(data.data, 0.5, delta);
  const auto est = dynamic_rank_centrality(data.data, 0.5, d, NormalizationPolicy::empirical());
  CHECK(est.pi.size() == 20);
  CHECK(std::abs(est.pi.sum() - 1.0) <= 1e-12);
  CHECK(est.pi.minCoeff() >= 0.0);
  auto sorted = est.ranking;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 20; ++i) CHECK(sorted[i] == i);
  for (std::size_t r = 1; r < est.ranking.size(); ++r) {
    CHECK(est.pi(est.ranking[r - 1]) >= est.pi(est.ranking[r]));
  }
}

TEST_CASE("scaling all weights leaves the pipeline output unchanged") {
  const std::vector<double> w{0.5, 1.0, 3.0, 2.0, 0.7};
  for (double c : {0.25, 4.0}) {
    std::vector<double> scaled;
    for (double v : w) scaled.push_back(v * c);
    const auto a = make_constant_weights(5, 8, 5, w, 0.4, 77);
    const auto b = make_constant_weights(5, 8, 5, scaled, 0.4, 77);
    CHECK(a.data == b.data);
    const auto pa = dynamic_rank_centrality(a.data, 0.5, 3.0, NormalizationPolicy::empirical());
    const auto pb = dynamic_rank_centrality(b.data, 0.5, 3.0, NormalizationPolicy::empirical());
    CHECK(pa.pi == pb.pi);
    CHECK((normalized_truth(a.truth, 3).pi - normalized_truth(b.truth, 3).pi).norm() <= 1e-15);
  }
}

TEST_CASE("more pooled data does not hurt when strengths are constant") {
  const std::vector<double> w{1.0, 1.5, 2.0, 3.0, 0.6, 0.8, 2.5, 1.2};
  const std::vector<double> radii{0.5, 1, 2, 4, 8, 16};
  std::vector<double> mean(radii.size(), 0.0), sq(radii.size(), 0.0);
  const int seeds = 20;
  for (int s = 0; s < seeds; ++s) {
    const auto data = make_constant_weights(8, 16, 5, w, 0.7, 500 + s);
    const auto truth = normalized_truth(data.truth, 8);
    for (std::size_t r = 0; r < radii.size(); ++r) {
      const double d = increase_delta_until_connected(data.data, 0.5, radii[r]);
      const auto est = dynamic_rank_centrality(data.data, 0.5, d, NormalizationPolicy::empirical());
      const double e = rel_l2(truth.pi, est.pi);
      mean[r] += e / seeds;
      sq[r] += e * e / seeds;
    }
  }
  for (std::size_t r = 1; r < radii.size(); ++r) {
    const double se = std::sqrt(std::max(sq[r] - mean[r] * mean[r], 0.0) / (seeds - 1));
    CHECK(mean[r] <= mean[r - 1] + se);
  }
}

TEST_CASE("increase_delta_until_connected") {
  SUBCASE("already connected") {
    const auto data = make_constant_weights(5, 10, 1, std::vector<double>(5, 1.0), 1.0, 1);
    CHECK(increase_delta_until_connected(data.data, 0.3, 2.0) == 2.0);
  }
  SUBCASE("edges only at the endpoints") {
    ComparisonDataset::Builder b(3, 10, 1);
    b.add(0, 0, 1, 0, 1).add(10, 1, 2, 0, 1);
    const auto ds = b.build();
    CHECK(increase_delta_until_connected(ds, 0.5, 1.0) == 5.0);
    CHECK(increase_delta_until_connected(ds, 0.5, 0.5) == 5.5);
  }
  SUBCASE("never identifiable") {
    ComparisonDataset::Builder b(4, 5, 1);
    b.add(0, 0, 1, 0, 1).add(5, 2, 3, 0, 1);
    CHECK_THROWS_AS(increase_delta_until_connected(b.build(), 0.5, 1.0), Error);
  }
  SUBCASE("random sparse data is minimal") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      const auto ds = testing::random_dataset(10, 30, 1, 0.05, seed);
      if (!union_graph_connected(ds, 0.0, 30.0)) continue;
      const double t = (seed % 7) / 6.0;
      const double d = increase_delta_until_connected(ds, t, 1.0);
      CHECK(union_graph_connected(ds, t, d));
      if (d > 1.0 && d < 30.0) CHECK_FALSE(union_graph_connected(ds, t, d - 1.0));
    }
  }
}

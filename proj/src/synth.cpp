#include "drc/synth.hpp"

#include <algorithm>
#include <sstream>
#include <string>

#include "drc/error.hpp"
#include "drc/graph.hpp"
#include "drc/rng.hpp"

namespace drc {

void SynthConfig::validate() const {
  if (n < 2) throw config_error("synthetic data needs n >= 2");
  if (intervals < 1) throw config_error("synthetic data needs T >= 1");
  if (L < 1) throw config_error("synthetic data needs L >= 1");
  if (!(p_lo > 0.0 && p_lo <= p_hi && p_hi <= 1.0)) {
    throw config_error("edge probability range must satisfy 0 < p_lo <= p_hi <= 1");
  }
  if (!(gp_mean_std >= 0.0)) throw config_error("GP mean std must be >= 0");
  if (max_graph_retries < 0) throw config_error("graph retries must be >= 0");
}

SynthConfig SynthConfig::sparse_default(int n, int intervals, int L, std::uint64_t seed) {
  SynthConfig cfg;
  cfg.n = n;
  cfg.intervals = intervals;
  cfg.L = L;
  cfg.p_lo = 1.0 / n;
  cfg.p_hi = std::min(1.0, std::log(static_cast<double>(n)) / n);
  cfg.seed = seed;
  return cfg;
}

Eigen::MatrixXd gp_covariance(int intervals) {
  const int size = intervals + 1;
  Eigen::MatrixXd cov(size, size);
  for (int r = 0; r < size; ++r) {
    for (int c = 0; c < size; ++c) {
      cov(r, c) = 1.0 - static_cast<double>(std::abs(r - c)) / (intervals + 1);
    }
  }
  return cov;
}

Eigen::MatrixXd cholesky_with_jitter(const Eigen::MatrixXd& cov) {
  const Eigen::MatrixXd sym = 0.5 * (cov + cov.transpose());
  Eigen::LLT<Eigen::MatrixXd> llt(sym);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  const auto I = Eigen::MatrixXd::Identity(sym.rows(), sym.cols());
  for (double jitter = 1e-10; jitter <= 1e-6 * 1.0001; jitter *= 10.0) {
    llt.compute(sym + jitter * I);
    if (llt.info() == Eigen::Success) return llt.matrixL();
  }
  throw config_error("GP covariance is not positive definite even with jitter 1e-6");
}

Eigen::MatrixXd sample_gp_weights(int n, int intervals, double mean_std,
                                  std::uint64_t seed) {
  const int size = intervals + 1;
  const Eigen::MatrixXd chol = cholesky_with_jitter(gp_covariance(intervals));
  Eigen::MatrixXd weights(size, n);
  Eigen::VectorXd mean(size), z(size);
  for (int i = 0; i < n; ++i) {
    Rng mean_rng = Rng::stream(seed, Stream::kStrengthMean, i);
    Rng path_rng = Rng::stream(seed, Stream::kStrengthPath, i);
    for (int k = 0; k < size; ++k) mean(k) = mean_std * mean_rng.normal();
    for (int k = 0; k < size; ++k) z(k) = path_rng.normal();
    weights.col(i) = (mean + chol * z).array().exp().matrix();
  }
  return weights;
}

namespace {

std::vector<std::pair<int, int>> sample_graph(int n, double p, std::uint64_t seed,
                                              int grid_index, int attempt) {
  Rng rng = Rng::stream(seed, Stream::kGraph, static_cast<std::uint64_t>(grid_index),
                        static_cast<std::uint64_t>(attempt));
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (rng.bernoulli(p)) edges.emplace_back(i, j);
    }
  }
  return edges;
}

std::uint64_t pair_index(int n, int i, int j) {
  return static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(n) +
         static_cast<std::uint64_t>(j);
}

// Samples graphs (with connectivity retries) and Bernoulli outcomes.
SynthData assemble(const Eigen::MatrixXd& weights, const std::vector<double>& p,
                   int L, std::uint64_t seed, bool ensure_connected, int max_retries) {
  const int n = static_cast<int>(weights.cols());
  const int T = static_cast<int>(weights.rows()) - 1;

  std::vector<std::vector<std::pair<int, int>>> graphs(T + 1);
  int attempt = 0;
  for (;; ++attempt) {
    EdgeList all;
    for (int k = 0; k <= T; ++k) {
      graphs[k] = sample_graph(n, p[k], seed, k, attempt);
      all.insert(all.end(), graphs[k].begin(), graphs[k].end());
    }
    if (!ensure_connected || is_connected(n, all)) break;
    if (attempt >= max_retries) {
      std::ostringstream msg;
      msg << "union graph still disconnected after " << max_retries << " graph resamples";
      throw data_error(msg.str());
    }
  }

  ComparisonDataset::Builder builder(n, T, L);
  for (int k = 0; k <= T; ++k) {
    for (auto [i, j] : graphs[k]) {
      Rng rng = Rng::stream(seed, Stream::kOutcome, static_cast<std::uint64_t>(k),
                            pair_index(n, i, j));
      const double prob_j = weights(k, j) / (weights(k, i) + weights(k, j));
      int wins = 0;
      for (int l = 0; l < L; ++l) wins += rng.bernoulli(prob_j) ? 1 : 0;
      builder.add(k, i, j, wins, L);
    }
  }

  SynthData out{builder.build(), GroundTruth{}, attempt};
  out.truth.weights = weights;
  out.truth.lipschitz = lipschitz_diagnostic(weights);
  out.truth.edge_probability = p;
  return out;
}

}  // namespace

SynthData generate(const SynthConfig& cfg) {
  cfg.validate();
  const Eigen::MatrixXd weights =
      sample_gp_weights(cfg.n, cfg.intervals, cfg.gp_mean_std, cfg.seed);
  std::vector<double> p(static_cast<std::size_t>(cfg.intervals) + 1);
  for (int k = 0; k <= cfg.intervals; ++k) {
    p[k] = Rng::stream(cfg.seed, Stream::kEdgeProbability, k).uniform(cfg.p_lo, cfg.p_hi);
  }
  return assemble(weights, p, cfg.L, cfg.seed, cfg.ensure_union_connected,
                  cfg.max_graph_retries);
}

SynthData make_constant_weights(int n, int intervals, int L,
                                const std::vector<double>& weights, double p,
                                std::uint64_t seed, bool ensure_union_connected) {
  if (static_cast<int>(weights.size()) != n) {
    throw config_error("weight vector length must equal n");
  }
  if (n < 2 || intervals < 0 || L < 1) throw config_error("need n >= 2, T >= 0, L >= 1");
  if (!(p > 0.0 && p <= 1.0)) throw config_error("edge probability must lie in (0, 1]");
  Eigen::MatrixXd w(intervals + 1, n);
  for (int i = 0; i < n; ++i) {
    if (!(weights[i] > 0.0)) throw config_error("weights must be positive");
    w.col(i).setConstant(weights[i]);
  }
  std::vector<double> probs(static_cast<std::size_t>(intervals) + 1, p);
  return assemble(w, probs, L, seed, ensure_union_connected, 100);
}

SynthData make_noiseless(int n, int intervals, const std::vector<int>& weights,
                         double p, std::uint64_t seed) {
  if (static_cast<int>(weights.size()) != n) {
    throw config_error("weight vector length must equal n");
  }
  std::vector<double> as_real(weights.begin(), weights.end());
  SynthData base = make_constant_weights(n, intervals, 1, as_real, p, seed);
  ComparisonDataset::Builder builder(n, intervals);
  for (int k = 0; k <= intervals; ++k) {
    for (const Comparison& c : base.data.at(k)) {
      builder.add(k, c.i, c.j, weights[c.j], weights[c.i] + weights[c.j]);
    }
  }
  base.data = builder.build();
  return base;
}

ComparisonDataset make_dominance_season(int n, int rounds) {
  if (n < 2 || rounds < 1) throw config_error("need n >= 2 and at least one round");
  ComparisonDataset::Builder builder(n, rounds - 1, 1);
  for (int r = 0; r < rounds; ++r) {
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) builder.add(r, i, j, 0, 1);  // i beats j
    }
  }
  return builder.build();
}

}  // namespace drc

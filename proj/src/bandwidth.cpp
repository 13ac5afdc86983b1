#include "drc/bandwidth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "drc/baselines.hpp"
#include "drc/error.hpp"
#include "drc/rng.hpp"

namespace drc {

namespace {

void require_rate_inputs(double M, double b, double n, int L, double p_min, int T) {
  if (!(M >= 0.0)) throw config_error("Lipschitz constant M must be >= 0");
  if (!(b >= 1.0)) throw config_error("dynamic range b must be >= 1");
  if (!(n >= 1.0)) throw config_error("n must be >= 1");
  if (L < 1) throw config_error("L must be >= 1");
  if (!(p_min > 0.0 && p_min <= 1.0)) throw config_error("p_min must lie in (0, 1]");
  if (T < 0) throw config_error("T must be >= 0");
}

double clamp_radius(double value, int T) {
  return std::max(std::min(value, static_cast<double>(T)), 0.5);
}

}  // namespace

double delta_star_l2(double M, double b, int n, int L, double p_min, int T) {
  require_rate_inputs(M, b, n, L, p_min, T);
  if (M == 0.0) return clamp_radius(T, T);
  const double value = std::cbrt(b * b) * std::cbrt(static_cast<double>(T) * T) /
                       (std::cbrt(4.0 * M * M) * n * std::cbrt(L * p_min));
  return clamp_radius(value, T);
}

double gamma_n(double b, double n) {
  if (!(n > 1.0)) throw config_error("gamma_n needs n > 1");
  const double log_n = std::log(n);
  return 1.0 + std::pow(b, 2.5) / std::sqrt(log_n) * std::max(b * b, log_n / std::sqrt(n));
}

double delta_star_linf(double M, double b, double n, int L, double p_min, int T,
                       std::optional<double> gamma) {
  require_rate_inputs(M, b, n, L, p_min, T);
  if (M == 0.0) return clamp_radius(T, T);
  const double g = gamma ? *gamma : gamma_n(b, n);
  const double value = std::cbrt(g * g) * std::cbrt(std::log(n)) *
                       std::cbrt(static_cast<double>(T) * T) /
                       (std::cbrt(4.0 * M * M) * n * std::pow(b, 7.0 / 3.0) *
                        std::cbrt(L * p_min));
  return clamp_radius(value, T);
}

std::vector<double> default_candidates(int T) {
  const double t = T;
  std::vector<double> out{std::ceil(std::cbrt(t)), std::ceil(std::sqrt(t)),
                          std::ceil(std::cbrt(t * t)), t / 4.0, t / 2.0, t};
  for (double& v : out) v = clamp_radius(v, T);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

StrengthEstimate estimate_with(Method method, const ComparisonDataset& ds, double t,
                               double delta, const NormalizationPolicy& normalization) {
  switch (method) {
    case Method::kDrc:
      return dynamic_rank_centrality(ds, t, delta, normalization);
    case Method::kMle:
      return mle_estimate(ds, t, delta).estimate;
    case Method::kBorda:
      return borda_estimate(ds, t, delta);
  }
  throw config_error("unknown method");
}

LoocvResult loocv_select(const ComparisonDataset& ds, double t,
                         std::vector<double> candidates, int trials, std::uint64_t seed,
                         Method method, const LoocvOptions& options) {
  if (candidates.empty()) throw config_error("LOOCV needs at least one candidate radius");
  if (trials < 1) throw config_error("LOOCV needs at least one trial");
  for (double c : candidates) {
    if (!(c >= 0.5)) throw config_error("candidate radius below 1/2");
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  struct Game {
    int k;
    std::size_t index;
  };
  std::vector<Game> games;
  for (int k = 0; k <= ds.intervals(); ++k) {
    for (std::size_t r = 0; r < ds.at(k).size(); ++r) games.push_back({k, r});
  }
  if (games.size() < 2) throw data_error("LOOCV needs at least two recorded games");

  std::vector<Game> held_out;
  held_out.reserve(static_cast<std::size_t>(trials));
  for (int r = 0; r < trials; ++r) {
    Rng rng = Rng::stream(seed, Stream::kLoocv, static_cast<std::uint64_t>(r));
    held_out.push_back(games[rng.below(games.size())]);
  }

  LoocvResult result;
  for (double delta : candidates) {
    LoocvScore score;
    score.delta = delta;
    double sq = 0.0, ab = 0.0;
    for (const Game& g : held_out) {
      const Comparison game = ds.at(g.k)[g.index];
      const ComparisonDataset rest = ds.without(g.k, g.index);
      const double t0 = ds.grid().point(g.k);
      try {
        if (method == Method::kDrc && !union_graph_connected(rest, t0, delta)) {
          ++score.skipped;
          continue;
        }
        const StrengthEstimate fit =
            estimate_with(method, rest, t0, delta, options.normalization);
        const double denom = fit.pi(game.i) + fit.pi(game.j);
        if (!(denom > 0.0)) {
          ++score.skipped;
          continue;
        }
        const double err = game.y() - fit.pi(game.j) / denom;
        sq += err * err;
        ab += std::abs(err);
        ++score.evaluated;
      } catch (const Error&) {
        ++score.skipped;
      }
    }
    score.feasible = 2 * score.skipped <= trials && score.evaluated > 0;
    if (score.evaluated > 0) {
      score.mean_squared = sq / score.evaluated;
      score.mean_absolute = ab / score.evaluated;
    }
    result.scores.push_back(score);
  }

  double best = std::numeric_limits<double>::infinity();
  bool found = false;
  for (const LoocvScore& s : result.scores) {
    if (!s.feasible) continue;
    const double value =
        options.loss == LoocvLoss::kSquared ? s.mean_squared : s.mean_absolute;
    if (value < best) {
      best = value;
      result.best_delta = s.delta;
      found = true;
    }
  }
  if (!found) throw estimation_error("LOOCV: every candidate radius is infeasible");
  result.estimate = estimate_with(method, ds, t, result.best_delta, options.normalization);
  return result;
}

}  // namespace drc

#pragma once

// Choosing the neighborhood radius delta: closed-form rate-optimal rules and
// leave-one-out cross-validation over held-out games.

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "drc/model.hpp"
#include "drc/spectral.hpp"

namespace drc {

/// delta = min{ b^(2/3) T^(2/3) / ((2M)^(2/3) n (L p_min)^(1/3)), T }, at
/// least 1/2. M = 0 gives T.
double delta_star_l2(double M, double b, int n, int L, double p_min, int T);

/// 1 + b^(5/2) / sqrt(log n) * max{ b^2, log n / sqrt(n) }.
double gamma_n(double b, double n);

/// l-infinity analogue: gamma^(2/3) (log n)^(1/3) T^(2/3) /
/// ((2M)^(2/3) n b^(7/3) (L p_min)^(1/3)), capped at T and floored at 1/2.
double delta_star_linf(double M, double b, double n, int L, double p_min, int T,
                       std::optional<double> gamma = std::nullopt);

/// {ceil(T^1/3), ceil(T^1/2), ceil(T^2/3), T/4, T/2, T} clamped to
/// [1/2, T], sorted and deduplicated.
std::vector<double> default_candidates(int T);

struct TheoryL2Rule {
  double M = 0.0;
  double b = 1.0;
  int L = 1;
  double p_min = 1.0;
};
struct TheoryLinfRule {
  double M = 0.0;
  double b = 1.0;
  int L = 1;
  double p_min = 1.0;
  double n = 2.0;
};
struct FixedGridRule {
  std::vector<double> candidates;
};
struct LoocvRule {
  std::vector<double> candidates;
  int trials = 200;
};
using DeltaRule = std::variant<TheoryL2Rule, TheoryLinfRule, FixedGridRule, LoocvRule>;

enum class LoocvLoss { kSquared, kAbsolute };

struct LoocvOptions {
  LoocvLoss loss = LoocvLoss::kSquared;
  NormalizationPolicy normalization = NormalizationPolicy::empirical();
};

struct LoocvScore {
  double delta = 0.0;
  double mean_squared = 0.0;
  double mean_absolute = 0.0;
  int evaluated = 0;
  /// Trials whose held-out game left the estimator without a solution.
  int skipped = 0;
  bool feasible = false;
};

struct LoocvResult {
  double best_delta = 0.0;
  std::vector<LoocvScore> scores;  // ascending delta
  /// Estimate at the query time using best_delta on the full data.
  StrengthEstimate estimate;
};

/// Holds out `trials` uniformly sampled recorded games (the same games for
/// every candidate), refits at the game's time, and scores the predicted
/// win probability. Candidates skipping more than half their trials are
/// infeasible; ties go to the smaller delta.
LoocvResult loocv_select(const ComparisonDataset& ds, double t,
                         std::vector<double> candidates, int trials, std::uint64_t seed,
                         Method method, const LoocvOptions& options = {});

/// Estimate with the requested method at radius delta.
StrengthEstimate estimate_with(Method method, const ComparisonDataset& ds, double t,
                               double delta, const NormalizationPolicy& normalization);

}  // namespace drc

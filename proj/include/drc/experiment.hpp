#pragma once

// Monte-Carlo sweep over synthetic datasets and the option parsing shared
// by the command-line tools.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "drc/bandwidth.hpp"
#include "drc/baselines.hpp"
#include "drc/model.hpp"
#include "drc/report.hpp"
#include "drc/spectral.hpp"
#include "drc/synth.hpp"

namespace drc {

/// How each grid point's starting radius is chosen before escalation to a
/// connected union graph.
struct DeltaPolicy {
  enum class Kind { kTheory, kTheoryPlugin, kLoocv, kFixed };
  Kind kind = Kind::kTheory;
  double fixed = 0.5;
};

/// "theory", "theory-plugin", "loocv" or "fixed:<v>".
DeltaPolicy parse_delta_policy(const std::string& text);
std::string to_string(const DeltaPolicy& policy);

/// Normalizer choice: "empirical", "maxdeg:<c>", "knownp:<p>" or "knownp"
/// (true p_delta from synthetic ground truth).
struct NormalizationChoice {
  NormalizationPolicy policy = NormalizationPolicy::empirical();
  /// kKnownP without a value: derive p_delta from the generator's p(t').
  bool known_from_truth = false;
};

NormalizationChoice parse_normalization(const std::string& text);
std::string to_string(const NormalizationChoice& choice);

struct SweepConfig {
  std::vector<int> n_values{50};
  std::vector<int> T_values{10, 50, 100};
  int L = 5;
  int runs = 30;
  std::vector<Method> methods{Method::kDrc, Method::kMle, Method::kBorda};
  /// Default to [1/n, log(n)/n] when absent.
  std::optional<double> p_lo;
  std::optional<double> p_hi;
  double gp_mean_std = 0.31622776601683794;
  DeltaPolicy delta;
  NormalizationChoice normalization;
  int loocv_trials = 200;
  std::uint64_t seed = 1;
  int jobs = 1;

  void validate() const;
  /// Effective settings as key/value pairs in file order.
  std::vector<std::pair<std::string, std::string>> to_pairs() const;
  /// INI text that parses back to this configuration.
  std::string to_ini() const;
};

/// Reads the [sweep] section of an INI file; unknown keys are rejected.
SweepConfig parse_sweep_config(const std::string& ini_text);

/// Seed of the (n, T, run) cell.
std::uint64_t cell_seed(std::uint64_t seed, int n, int T, int run);

/// The l2 rate T^(2/3) with every problem constant set to one.
double theory_rate_delta(int T);

/// Plug-in version of the l2 rule with M, b and p_min taken from the truth.
double theory_delta(const GroundTruth& truth, int grid_index, int n, int L);

/// Kernel-smoothed MLE, widening the window by one grid step at a time until
/// the smoothed win graph is strongly connected. Returns the fit and the
/// radius used.
std::pair<MleResult, double> mle_with_escalation(const ComparisonDataset& ds, double t,
                                                 double delta);

/// Evaluates every configured method at every grid point of one dataset.
std::vector<CellResult> evaluate_dataset(const SweepConfig& cfg, const SynthData& data,
                                         int run, std::uint64_t seed);

/// Full sweep; cells are ordered by (n, T, run, grid point, method)
/// regardless of `jobs`.
ExperimentReport run_sweep(const SweepConfig& cfg);

}  // namespace drc

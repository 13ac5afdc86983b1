#pragma once

// Dynamic Rank Centrality: a random walk on the union comparison graph whose
// stationary distribution estimates the normalized strengths at time t.

#include <span>

#include <Eigen/Dense>

#include "drc/graph.hpp"
#include "drc/model.hpp"

namespace drc {

/// How the row normalizer d_delta(t) is chosen. Every policy guarantees
/// d_norm >= d_max of the union graph (KnownP fails loudly otherwise).
struct NormalizationPolicy {
  enum class Kind { kMaxDegree, kKnownP, kEmpiricalP };

  Kind kind = Kind::kEmpiricalP;
  /// Factor c for kMaxDegree, edge probability p_delta for kKnownP.
  double value = 0.0;

  static NormalizationPolicy max_degree(double factor = 1.0);
  static NormalizationPolicy known_p(double p_delta);
  static NormalizationPolicy empirical();

  /// d_norm for a union graph with `n_edges` edges and maximum degree `d_max`.
  double resolve(int n, std::size_t n_edges, int d_max) const;
};

struct TransitionMatrix {
  Eigen::MatrixXd entries;
  double d_norm = 1.0;

  int n() const { return static_cast<int>(entries.rows()); }
};

/// P_ij = ybar_ij / d_norm on union edges, diagonal fills rows to one.
TransitionMatrix build_transition(const NeighborhoodView& view, int n,
                                  const NormalizationPolicy& policy);

/// Same chain built from true win probabilities w_j / (w_i + w_j) on the
/// union edges of `view`.
TransitionMatrix build_truth_transition(const NeighborhoodView& view,
                                        const Eigen::VectorXd& weights,
                                        double d_norm);

/// Static Rank Centrality on the comparisons of a single graph.
TransitionMatrix build_static_transition(int n, std::span<const Comparison> comparisons,
                                         const NormalizationPolicy& policy);

struct PowerIterationOptions {
  double tolerance = 1e-10;
  int max_iterations = 100000;
};

struct PowerIterationInfo {
  int iterations = 0;
  /// Whether the lazy chain (P + I) / 2 was iterated instead of P.
  bool lazy = false;
  double last_step = 0.0;
};

/// Left power iteration from the uniform vector with l1 renormalization.
/// Throws if the support graph of P is disconnected or iteration stalls.
StrengthEstimate stationary_distribution(const TransitionMatrix& P, double t = 0.0,
                                         const PowerIterationOptions& options = {},
                                         PowerIterationInfo* info = nullptr);

struct DrcResult {
  StrengthEstimate estimate;
  GraphDiagnostics graph;
  double d_norm = 0.0;
  double delta = 0.0;
  PowerIterationInfo iteration;
};

/// Neighborhood, transition matrix and stationary distribution at time t.
DrcResult dynamic_rank_centrality_detailed(const ComparisonDataset& ds, double t,
                                           double delta,
                                           const NormalizationPolicy& policy,
                                           const PowerIterationOptions& options = {});

StrengthEstimate dynamic_rank_centrality(const ComparisonDataset& ds, double t,
                                         double delta,
                                         const NormalizationPolicy& policy,
                                         const PowerIterationOptions& options = {});

/// Static Rank Centrality of the graph at one grid point.
StrengthEstimate static_rank_centrality(const ComparisonDataset& ds, int grid_index,
                                        const NormalizationPolicy& policy,
                                        const PowerIterationOptions& options = {});

bool union_graph_connected(const ComparisonDataset& ds, double t, double delta);

/// Smallest radius in {delta0, delta0 + 1, ..., T} whose union graph at t is
/// connected (T itself is tried last).
double increase_delta_until_connected(const ComparisonDataset& ds, double t,
                                      double delta0);

}  // namespace drc

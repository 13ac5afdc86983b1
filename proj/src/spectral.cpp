#include "drc/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "drc/error.hpp"

namespace drc {

NormalizationPolicy NormalizationPolicy::max_degree(double factor) {
  if (!(factor >= 1.0)) throw config_error("max-degree factor must be >= 1");
  return {Kind::kMaxDegree, factor};
}

NormalizationPolicy NormalizationPolicy::known_p(double p_delta) {
  if (!(p_delta > 0.0 && p_delta <= 1.0)) {
    throw config_error("known edge probability must lie in (0, 1]");
  }
  return {Kind::kKnownP, p_delta};
}

NormalizationPolicy NormalizationPolicy::empirical() { return {Kind::kEmpiricalP, 0.0}; }

double NormalizationPolicy::resolve(int n, std::size_t n_edges, int d_max) const {
  switch (kind) {
    case Kind::kMaxDegree:
      return value * d_max;
    case Kind::kKnownP: {
      const double d = 3.0 * n * value;
      if (d < d_max) {
        std::ostringstream msg;
        msg << "normalizer 3*n*p = " << d << " is below the maximum degree " << d_max
            << "; p_delta is misconfigured";
        throw config_error(msg.str());
      }
      return d;
    }
    case Kind::kEmpiricalP: {
      const double pairs = 0.5 * n * (n - 1.0);
      const double p_hat = pairs > 0 ? static_cast<double>(n_edges) / pairs : 0.0;
      return std::max(3.0 * n * p_hat, static_cast<double>(d_max));
    }
  }
  return d_max;
}

namespace {

// Fills the diagonal so that each row sums to one.
void complete_rows(Eigen::MatrixXd& P) {
  for (Eigen::Index i = 0; i < P.rows(); ++i) {
    P(i, i) = 0.0;
    const double rest = 1.0 - P.row(i).sum();
    P(i, i) = rest > 0.0 ? rest : 0.0;
  }
}

int max_degree_of(const NeighborhoodView& view, int n) {
  const auto deg = degrees(n, edge_list(view));
  return deg.empty() ? 0 : *std::max_element(deg.begin(), deg.end());
}

}  // namespace

TransitionMatrix build_transition(const NeighborhoodView& view, int n,
                                  const NormalizationPolicy& policy) {
  if (view.edges.empty()) {
    std::ostringstream msg;
    msg << "no comparisons within delta=" << view.delta << " of t=" << view.t;
    throw data_error(msg.str());
  }
  TransitionMatrix P;
  P.d_norm = policy.resolve(n, view.edges.size(), max_degree_of(view, n));
  P.entries = Eigen::MatrixXd::Zero(n, n);
  for (const UnionEdge& e : view.edges) {
    P.entries(e.i, e.j) = e.ybar / P.d_norm;
    P.entries(e.j, e.i) = (1.0 - e.ybar) / P.d_norm;
  }
  complete_rows(P.entries);
  return P;
}

TransitionMatrix build_truth_transition(const NeighborhoodView& view,
                                        const Eigen::VectorXd& weights, double d_norm) {
  if (!(d_norm > 0.0)) throw config_error("normalizer must be positive");
  const int n = static_cast<int>(weights.size());
  TransitionMatrix P;
  P.d_norm = d_norm;
  P.entries = Eigen::MatrixXd::Zero(n, n);
  for (const UnionEdge& e : view.edges) {
    const double denom = weights(e.i) + weights(e.j);
    P.entries(e.i, e.j) = weights(e.j) / denom / d_norm;
    P.entries(e.j, e.i) = weights(e.i) / denom / d_norm;
  }
  complete_rows(P.entries);
  return P;
}

TransitionMatrix build_static_transition(int n, std::span<const Comparison> comparisons,
                                         const NormalizationPolicy& policy) {
  if (comparisons.empty()) throw data_error("no comparisons in static graph");
  EdgeList edges;
  for (const auto& c : comparisons) edges.emplace_back(c.i, c.j);
  const auto deg = degrees(n, edges);
  TransitionMatrix P;
  P.d_norm = policy.resolve(n, edges.size(), *std::max_element(deg.begin(), deg.end()));
  P.entries = Eigen::MatrixXd::Zero(n, n);
  for (const auto& c : comparisons) {
    P.entries(c.i, c.j) = c.y() / P.d_norm;
    P.entries(c.j, c.i) = (1.0 - c.y()) / P.d_norm;
  }
  complete_rows(P.entries);
  return P;
}

StrengthEstimate stationary_distribution(const TransitionMatrix& P, double t,
                                         const PowerIterationOptions& options,
                                         PowerIterationInfo* info) {
  const int n = P.n();
  if (n == 0) throw config_error("empty transition matrix");

  EdgeList support;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (P.entries(i, j) > 0.0 || P.entries(j, i) > 0.0) support.emplace_back(i, j);
    }
  }
  if (!is_connected(n, support)) {
    throw estimation_error("comparison graph is disconnected: strengths are not identifiable");
  }

  PowerIterationInfo local;
  Eigen::MatrixXd step_matrix = P.entries.transpose();
  if (P.entries.diagonal().maxCoeff() <= 0.0) {
    // Periodic chains may oscillate; (P + I) / 2 shares the stationary law.
    local.lazy = true;
    step_matrix = 0.5 * (step_matrix + Eigen::MatrixXd::Identity(n, n));
  }

  Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / n);
  Eigen::VectorXd next(n);
  bool converged = false;
  for (int it = 1; it <= options.max_iterations; ++it) {
    next.noalias() = step_matrix * x;
    next /= next.lpNorm<1>();
    local.last_step = (next - x).lpNorm<1>();
    local.iterations = it;
    x.swap(next);
    if (local.last_step <= options.tolerance) {
      converged = true;
      break;
    }
  }
  if (info != nullptr) *info = local;
  if (!converged) {
    std::ostringstream msg;
    msg << "power iteration did not converge in " << options.max_iterations
        << " iterations (last l1 step " << local.last_step
        << "); the chain may be reducible or periodic";
    throw estimation_error(msg.str());
  }
  return make_estimate(t, x.cwiseMax(0.0));
}

DrcResult dynamic_rank_centrality_detailed(const ComparisonDataset& ds, double t,
                                           double delta,
                                           const NormalizationPolicy& policy,
                                           const PowerIterationOptions& options) {
  const NeighborhoodView view = neighborhood(ds, t, delta);
  DrcResult out;
  out.delta = view.delta;
  out.graph = diagnostics(edge_list(view), ds.n());
  try {
    const TransitionMatrix P = build_transition(view, ds.n(), policy);
    out.d_norm = P.d_norm;
    out.estimate = stationary_distribution(P, t, options, &out.iteration);
  } catch (const Error& e) {
    std::ostringstream msg;
    msg << e.what() << " [t=" << t << ", delta=" << view.delta << "]";
    throw Error(e.kind(), msg.str());
  }
  return out;
}

StrengthEstimate dynamic_rank_centrality(const ComparisonDataset& ds, double t,
                                         double delta,
                                         const NormalizationPolicy& policy,
                                         const PowerIterationOptions& options) {
  return dynamic_rank_centrality_detailed(ds, t, delta, policy, options).estimate;
}

StrengthEstimate static_rank_centrality(const ComparisonDataset& ds, int grid_index,
                                        const NormalizationPolicy& policy,
                                        const PowerIterationOptions& options) {
  const TransitionMatrix P = build_static_transition(ds.n(), ds.at(grid_index), policy);
  return stationary_distribution(P, ds.grid().point(grid_index), options);
}

bool union_graph_connected(const ComparisonDataset& ds, double t, double delta) {
  EdgeList edges;
  for (int k : neighborhood_times(ds.grid(), t, delta)) {
    for (const auto& c : ds.at(k)) edges.emplace_back(c.i, c.j);
  }
  return is_connected(ds.n(), edges);
}

double increase_delta_until_connected(const ComparisonDataset& ds, double t,
                                      double delta0) {
  const double T = ds.intervals();
  const double full = std::max(T, 0.5);
  if (!union_graph_connected(ds, t, full)) {
    throw estimation_error("union graph over the whole grid is disconnected: "
                           "strengths are never identifiable");
  }
  if (!(delta0 >= 0.5)) throw config_error("initial radius must be >= 1/2");
  for (double delta = delta0; delta < T; delta += 1.0) {
    if (union_graph_connected(ds, t, delta)) return delta;
  }
  return full;
}

}  // namespace drc

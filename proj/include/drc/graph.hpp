#pragma once

// Neighborhoods on the time grid, union comparison graphs, averaged win
// fractions and graph diagnostics.

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "drc/model.hpp"

namespace drc {

/// Absolute slack used when testing |t - t'| <= delta / T.
inline constexpr double kGridSlack = 1e-12;

/// One edge {i, j} (i < j) of the union graph over a neighborhood.
struct UnionEdge {
  int i = 0;
  int j = 0;
  /// Grid indices in the neighborhood where the pair was compared.
  std::vector<int> times;
  /// Mean of y_ij(t') over `times` (fraction of wins of j over i).
  double ybar = 0.0;
};

struct NeighborhoodView {
  double t = 0.0;
  double delta = 0.0;
  /// True when the requested radius exceeded T and was clamped.
  bool delta_clamped = false;
  int n = 0;
  /// Grid indices with |t - t'| <= delta / T, ascending.
  std::vector<int> times;
  /// Union edges sorted by (i, j).
  std::vector<UnionEdge> edges;

  /// Averaged fraction of wins of `to` over `from`; 0 when not an edge.
  double ybar(int from, int to) const;
  const UnionEdge* find(int i, int j) const;

  std::size_t min_edge_times() const;
  std::size_t max_edge_times() const;
};

/// Grid indices within delta / T of t. For T = 0 this is always {0}.
std::vector<int> neighborhood_times(const TimeGrid& grid, double t, double delta);

/// Union graph and averaged statistics around time t with radius delta.
/// delta < 1/2 is rejected; delta > T is clamped to T.
NeighborhoodView neighborhood(const ComparisonDataset& ds, double t, double delta);

struct GraphDiagnostics {
  int d_min = 0;
  int d_max = 0;
  std::size_t n_edges = 0;
  bool connected = false;
  /// 1 - max(lambda_2, -lambda_n) of D^-1 A; absent if a vertex is isolated.
  std::optional<double> spectral_gap;
};

using EdgeList = std::vector<std::pair<int, int>>;

EdgeList edge_list(const NeighborhoodView& view);
std::vector<int> degrees(int n, const EdgeList& edges);
bool is_connected(int n, const EdgeList& edges);
/// Spectral gap of the random-walk matrix D^-1 A (nullopt if isolated vertex).
std::optional<double> spectral_gap(int n, const EdgeList& edges);

GraphDiagnostics diagnostics(const EdgeList& edges, int n);
GraphDiagnostics diagnostics(const NeighborhoodView& view, int n);

/// Edge probability of the union of independent G(n, p_k): 1 - prod(1 - p_k).
double union_edge_probability(std::span<const double> p_values);

}  // namespace drc

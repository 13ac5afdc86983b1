#include "drc/graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

#include "drc/error.hpp"

namespace drc {

double NeighborhoodView::ybar(int from, int to) const {
  const UnionEdge* e = find(from, to);
  if (e == nullptr) return 0.0;
  return from == e->i ? e->ybar : 1.0 - e->ybar;
}

const UnionEdge* NeighborhoodView::find(int i, int j) const {
  if (i > j) std::swap(i, j);
  auto it = std::lower_bound(edges.begin(), edges.end(), std::pair{i, j},
                             [](const UnionEdge& e, const std::pair<int, int>& key) {
                               return std::pair{e.i, e.j} < key;
                             });
  if (it == edges.end() || it->i != i || it->j != j) return nullptr;
  return &*it;
}

std::size_t NeighborhoodView::min_edge_times() const {
  std::size_t best = 0;
  for (const auto& e : edges) {
    if (best == 0 || e.times.size() < best) best = e.times.size();
  }
  return best;
}

std::size_t NeighborhoodView::max_edge_times() const {
  std::size_t best = 0;
  for (const auto& e : edges) best = std::max(best, e.times.size());
  return best;
}

std::vector<int> neighborhood_times(const TimeGrid& grid, double t, double delta) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw config_error("query time " + std::to_string(t) + " outside [0, 1]");
  }
  if (!(delta >= 0.5)) {
    throw config_error("neighborhood radius " + std::to_string(delta) +
                       " below 1/2 can leave the neighborhood empty");
  }
  const int T = grid.intervals();
  if (T == 0) return {0};
  delta = std::min(delta, static_cast<double>(T));
  std::vector<int> out;
  const double radius = delta / T + kGridSlack;
  for (int k = 0; k <= T; ++k) {
    if (std::abs(t - grid.point(k)) <= radius) out.push_back(k);
  }
  return out;
}

NeighborhoodView neighborhood(const ComparisonDataset& ds, double t, double delta) {
  NeighborhoodView view;
  view.times = neighborhood_times(ds.grid(), t, delta);
  view.t = t;
  view.n = ds.n();
  const int T = ds.intervals();
  view.delta_clamped = T > 0 && delta > T;
  view.delta = view.delta_clamped ? static_cast<double>(T) : delta;

  struct Acc {
    std::vector<int> times;
    double sum = 0.0;
  };
  std::map<std::pair<int, int>, Acc> acc;
  for (int k : view.times) {
    for (const Comparison& c : ds.at(k)) {
      Acc& a = acc[{c.i, c.j}];
      a.times.push_back(k);
      a.sum += c.y();
    }
  }
  view.edges.reserve(acc.size());
  for (auto& [key, a] : acc) {
    UnionEdge e;
    e.i = key.first;
    e.j = key.second;
    e.ybar = a.sum / static_cast<double>(a.times.size());
    e.times = std::move(a.times);
    view.edges.push_back(std::move(e));
  }
  return view;
}

EdgeList edge_list(const NeighborhoodView& view) {
  EdgeList out;
  out.reserve(view.edges.size());
  for (const auto& e : view.edges) out.emplace_back(e.i, e.j);
  return out;
}

std::vector<int> degrees(int n, const EdgeList& edges) {
  std::vector<int> deg(static_cast<std::size_t>(n), 0);
  for (auto [i, j] : edges) {
    ++deg[i];
    ++deg[j];
  }
  return deg;
}

bool is_connected(int n, const EdgeList& edges) {
  if (n <= 1) return true;
  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  auto root = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  int components = n;
  for (auto [i, j] : edges) {
    const int a = root(i);
    const int b = root(j);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components == 1;
}

std::optional<double> spectral_gap(int n, const EdgeList& edges) {
  const std::vector<int> deg = degrees(n, edges);
  if (n == 0 || std::any_of(deg.begin(), deg.end(), [](int d) { return d == 0; })) {
    return std::nullopt;
  }
  // D^-1 A is similar to the symmetric D^-1/2 A D^-1/2.
  Eigen::MatrixXd sym = Eigen::MatrixXd::Zero(n, n);
  for (auto [i, j] : edges) {
    const double v = 1.0 / std::sqrt(static_cast<double>(deg[i]) * deg[j]);
    sym(i, j) = v;
    sym(j, i) = v;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& ev = solver.eigenvalues();  // ascending
  if (n == 1) return 1.0;
  const double second = ev(n - 2);
  const double smallest = ev(0);
  const double gap = 1.0 - std::max(second, -smallest);
  return std::clamp(gap, 0.0, 2.0);
}

GraphDiagnostics diagnostics(const EdgeList& edges, int n) {
  GraphDiagnostics out;
  const std::vector<int> deg = degrees(n, edges);
  if (!deg.empty()) {
    auto [lo, hi] = std::minmax_element(deg.begin(), deg.end());
    out.d_min = *lo;
    out.d_max = *hi;
  }
  out.n_edges = edges.size();
  out.connected = is_connected(n, edges) && (n == 1 || out.d_min > 0);
  out.spectral_gap = spectral_gap(n, edges);
  return out;
}

GraphDiagnostics diagnostics(const NeighborhoodView& view, int n) {
  return diagnostics(edge_list(view), n);
}

double union_edge_probability(std::span<const double> p_values) {
  double stay = 1.0;
  for (double p : p_values) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw config_error("edge probability " + std::to_string(p) + " outside [0, 1]");
    }
    stay *= 1.0 - p;
  }
  return 1.0 - stay;
}

}  // namespace drc

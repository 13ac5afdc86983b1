#include "drc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "drc/error.hpp"

namespace drc {

std::vector<int> rank_positions(const std::vector<int>& ranking) {
  std::vector<int> pos(ranking.size(), -1);
  for (std::size_t r = 0; r < ranking.size(); ++r) {
    const int item = ranking[r];
    if (item < 0 || static_cast<std::size_t>(item) >= ranking.size() || pos[item] != -1) {
      throw config_error("ranking is not a permutation");
    }
    pos[item] = static_cast<int>(r);
  }
  return pos;
}

double d_metric(const Eigen::VectorXd& pi_star, const std::vector<int>& ranking) {
  const auto n = static_cast<std::size_t>(pi_star.size());
  if (ranking.size() != n) {
    throw config_error("ranking has " + std::to_string(ranking.size()) +
                       " items, strengths have " + std::to_string(n));
  }
  const std::vector<int> sigma = rank_positions(ranking);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double gap = pi_star(i) - pi_star(j);
      if (gap * (sigma[i] - sigma[j]) > 0.0) sum += gap * gap;
    }
  }
  return std::sqrt(sum / (2.0 * n * pi_star.squaredNorm()));
}

double rel_l2(const Eigen::VectorXd& pi_star, const Eigen::VectorXd& pi_hat) {
  if (pi_star.size() != pi_hat.size()) throw config_error("dimension mismatch");
  return (pi_hat - pi_star).norm() / pi_star.norm();
}

double rel_linf(const Eigen::VectorXd& pi_star, const Eigen::VectorXd& pi_hat) {
  if (pi_star.size() != pi_hat.size()) throw config_error("dimension mismatch");
  return (pi_hat - pi_star).lpNorm<Eigen::Infinity>() /
         pi_star.lpNorm<Eigen::Infinity>();
}

int top_k_overlap(const std::vector<int>& a, const std::vector<int>& b, int k) {
  const auto take = [k](const std::vector<int>& r) {
    const auto m = std::min(r.size(), static_cast<std::size_t>(std::max(k, 0)));
    return std::set<int>(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(m));
  };
  const std::set<int> sa = take(a);
  const std::set<int> sb = take(b);
  return static_cast<int>(std::count_if(sa.begin(), sa.end(),
                                        [&](int x) { return sb.count(x) > 0; }));
}

ErrorRecord evaluate(Method method, const StrengthEstimate& truth,
                     const StrengthEstimate& estimate, bool has_weights,
                     std::optional<int> top_k) {
  ErrorRecord rec;
  rec.t = estimate.t;
  rec.method = method;
  rec.d_metric = d_metric(truth.pi, estimate.ranking);
  if (has_weights) {
    rec.rel_l2 = rel_l2(truth.pi, estimate.pi);
    rec.rel_linf = rel_linf(truth.pi, estimate.pi);
  }
  if (top_k) rec.top_k_overlap = top_k_overlap(truth.ranking, estimate.ranking, *top_k);
  return rec;
}

}  // namespace drc

#include "drc/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "drc/error.hpp"
#include "drc/graph.hpp"

namespace drc {

BordaResult borda_scores(const ComparisonDataset& ds, double t, double delta) {
  const int n = ds.n();
  Eigen::VectorXd wins = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd games = Eigen::VectorXd::Zero(n);
  for (int k : neighborhood_times(ds.grid(), t, delta)) {
    for (const Comparison& c : ds.at(k)) {
      wins(c.i) += c.trials - c.wins;
      wins(c.j) += c.wins;
      games(c.i) += c.trials;
      games(c.j) += c.trials;
    }
  }
  BordaResult out;
  out.t = t;
  out.scores = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    if (games(i) > 0) {
      out.scores(i) = wins(i) / games(i);
    } else {
      out.uncompared.push_back(i);
    }
  }
  out.ranking = ranking_from_scores(out.scores);
  return out;
}

StrengthEstimate borda_estimate(const ComparisonDataset& ds, double t, double delta) {
  BordaResult b = borda_scores(ds, t, delta);
  StrengthEstimate est = make_estimate(t, b.scores);
  return est;
}

Kernel parse_kernel(std::string_view text) {
  if (text == "boxcar") return Kernel::kBoxcar;
  if (text == "epanechnikov") return Kernel::kEpanechnikov;
  throw config_error("unknown kernel '" + std::string(text) + "'");
}

double kernel_weight(Kernel kernel, double tp, double t, double h) {
  const double dist = std::abs(tp - t);
  switch (kernel) {
    case Kernel::kBoxcar:
      return dist <= h + kGridSlack ? 1.0 : 0.0;
    case Kernel::kEpanechnikov: {
      const double u = dist / h;
      return u < 1.0 - kGridSlack ? 0.75 * (1.0 - u * u) : 0.0;
    }
  }
  return 0.0;
}

SmoothedCounts smooth_counts(const ComparisonDataset& ds, double t, double h,
                             Kernel kernel) {
  if (!(h > 0.0)) throw config_error("bandwidth must be positive");
  const int n = ds.n();
  SmoothedCounts out;
  out.h = h;
  out.kernel = kernel;
  out.wins = Eigen::MatrixXd::Zero(n, n);
  double total_weight = 0.0;
  for (int k = 0; k <= ds.intervals(); ++k) {
    const double w = kernel_weight(kernel, ds.grid().point(k), t, h);
    total_weight += w;
    if (w == 0.0) continue;
    for (const Comparison& c : ds.at(k)) {
      out.wins(c.j, c.i) += w * c.wins;
      out.wins(c.i, c.j) += w * (c.trials - c.wins);
    }
  }
  if (total_weight == 0.0) {
    std::ostringstream msg;
    msg << "bandwidth h=" << h << " covers no grid point near t=" << t;
    throw config_error(msg.str());
  }
  return out;
}

namespace {

// log(1 + exp(x)) without overflow.
double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double logistic(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

double mle_objective(const Eigen::MatrixXd& wins, const Eigen::VectorXd& beta) {
  const Eigen::Index n = wins.rows();
  double total = 0.0, value = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j || wins(i, j) == 0.0) continue;
      total += wins(i, j);
      value += wins(i, j) * softplus(beta(j) - beta(i));
    }
  }
  if (total == 0.0) throw data_error("no smoothed comparisons");
  return value / total;
}

Eigen::VectorXd mle_gradient(const Eigen::MatrixXd& wins, const Eigen::VectorXd& beta) {
  const Eigen::Index n = wins.rows();
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(n);
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j || wins(i, j) == 0.0) continue;
      total += wins(i, j);
      const double g = wins(i, j) * logistic(beta(j) - beta(i));
      grad(j) += g;
      grad(i) -= g;
    }
  }
  if (total == 0.0) throw data_error("no smoothed comparisons");
  return grad / total;
}

bool strongly_connected(const Eigen::MatrixXd& wins) {
  const Eigen::Index n = wins.rows();
  if (n <= 1) return true;
  auto reaches_all = [&](bool forward) {
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::vector<Eigen::Index> stack{0};
    seen[0] = 1;
    Eigen::Index count = 1;
    while (!stack.empty()) {
      const Eigen::Index u = stack.back();
      stack.pop_back();
      for (Eigen::Index v = 0; v < n; ++v) {
        const double arc = forward ? wins(u, v) : wins(v, u);
        if (v != u && arc > 0.0 && !seen[v]) {
          seen[v] = 1;
          ++count;
          stack.push_back(v);
        }
      }
    }
    return count == n;
  };
  return reaches_all(true) && reaches_all(false);
}

MleResult mle_fit(const SmoothedCounts& counts, const MleOptions& options,
                  std::optional<Eigen::VectorXd> initial, double t) {
  const Eigen::MatrixXd& X = counts.wins;
  const Eigen::Index n = X.rows();
  if (!strongly_connected(X)) {
    throw estimation_error("smoothed win graph is not strongly connected: the MLE does not exist");
  }
  Eigen::VectorXd beta = initial ? *initial : Eigen::VectorXd::Zero(n);
  if (beta.size() != n) throw config_error("initializer has the wrong dimension");
  beta.array() -= beta.mean();

  double value = mle_objective(X, beta);
  Eigen::VectorXd grad = mle_gradient(X, beta);
  grad.array() -= grad.mean();
  double step = options.step;
  MleResult out;
  bool converged = false;
  for (int it = 0; it < options.max_iterations; ++it) {
    out.iterations = it;
    if (grad.lpNorm<Eigen::Infinity>() <= options.tolerance) {
      converged = true;
      break;
    }
    // Backtrack until the Armijo condition holds.
    const double slope = grad.squaredNorm();
    Eigen::VectorXd candidate;
    double candidate_value = value;
    for (int halvings = 0;; ++halvings) {
      candidate = beta - step * grad;
      candidate.array() -= candidate.mean();
      candidate_value = mle_objective(X, candidate);
      if (candidate_value <= value - 1e-4 * step * slope) break;
      if (halvings > 60) {
        // Step underflow: no further decrease is representable.
        candidate = beta;
        candidate_value = value;
        break;
      }
      step *= 0.5;
    }
    Eigen::VectorXd next_grad = mle_gradient(X, candidate);
    next_grad.array() -= next_grad.mean();
    const Eigen::VectorXd s = candidate - beta;
    const Eigen::VectorXd y = next_grad - grad;
    if (s.squaredNorm() == 0.0) {
      converged = grad.lpNorm<Eigen::Infinity>() <= options.tolerance * 10;
      break;
    }
    const double sy = s.dot(y);
    // Barzilai-Borwein trial step for the next iteration.
    step = sy > 0.0 ? s.squaredNorm() / sy : 2.0 * step;
    beta = candidate;
    value = candidate_value;
    grad = next_grad;
  }
  if (!converged) {
    std::ostringstream msg;
    msg << "MLE gradient descent did not converge in " << options.max_iterations
        << " iterations (gradient " << grad.lpNorm<Eigen::Infinity>() << ")";
    throw estimation_error(msg.str());
  }
  out.beta = beta;
  out.objective = value;
  const Eigen::VectorXd expb = (beta.array() - beta.maxCoeff()).exp().matrix();
  out.estimate = make_estimate(t, expb);
  return out;
}

MleResult mle_estimate(const ComparisonDataset& ds, double t, double delta,
                       const MleOptions& options) {
  const int T = ds.intervals();
  const double h = T > 0 ? std::min(delta, static_cast<double>(T)) / T : 1.0;
  return mle_fit(smooth_counts(ds, t, h, Kernel::kBoxcar), options, std::nullopt, t);
}

}  // namespace drc

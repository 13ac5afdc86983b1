#include "drc/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <set>
#include <sstream>
#include <thread>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "drc/error.hpp"
#include "drc/graph.hpp"
#include "drc/io.hpp"
#include "drc/metrics.hpp"
#include "drc/rng.hpp"

namespace drc {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return "";
  return s.substr(first, s.find_last_not_of(" \t") - first + 1);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_real(const std::string& text, const std::string& key) {
  try {
    return parse_real(trim(text));
  } catch (const Error&) {
    throw config_error("'" + key + "' expects a number, got '" + text + "'");
  }
}

long to_int(const std::string& text, const std::string& key) {
  const double v = to_real(text, key);
  if (v != std::floor(v)) throw config_error("'" + key + "' expects an integer");
  return static_cast<long>(v);
}

template <typename T>
std::string join(const std::vector<T>& values) {
  std::ostringstream out;
  for (std::size_t i = 0; i < values.size(); ++i) out << (i ? "," : "") << values[i];
  return out.str();
}

}  // namespace

DeltaPolicy parse_delta_policy(const std::string& text) {
  if (text == "theory") return {DeltaPolicy::Kind::kTheory, 0.5};
  if (text == "theory-plugin") return {DeltaPolicy::Kind::kTheoryPlugin, 0.5};
  if (text == "loocv") return {DeltaPolicy::Kind::kLoocv, 0.5};
  if (text.rfind("fixed:", 0) == 0) {
    const double v = to_real(text.substr(6), "delta");
    if (!(v >= 0.5)) throw config_error("fixed delta must be >= 1/2");
    return {DeltaPolicy::Kind::kFixed, v};
  }
  throw config_error("delta policy must be theory, theory-plugin, loocv or fixed:<v>, got '" +
                     text + "'");
}

std::string to_string(const DeltaPolicy& policy) {
  switch (policy.kind) {
    case DeltaPolicy::Kind::kTheory:
      return "theory";
    case DeltaPolicy::Kind::kTheoryPlugin:
      return "theory-plugin";
    case DeltaPolicy::Kind::kLoocv:
      return "loocv";
    case DeltaPolicy::Kind::kFixed:
      return "fixed:" + format_real(policy.fixed);
  }
  return "theory";
}

NormalizationChoice parse_normalization(const std::string& text) {
  if (text == "empirical") return {NormalizationPolicy::empirical(), false};
  if (text == "knownp") return {NormalizationPolicy{NormalizationPolicy::Kind::kKnownP, 0.0}, true};
  if (text.rfind("knownp:", 0) == 0) {
    return {NormalizationPolicy::known_p(to_real(text.substr(7), "normalization")), false};
  }
  if (text.rfind("maxdeg:", 0) == 0) {
    return {NormalizationPolicy::max_degree(to_real(text.substr(7), "normalization")),
            false};
  }
  if (text == "maxdeg") return {NormalizationPolicy::max_degree(1.0), false};
  throw config_error("normalization must be empirical, maxdeg:<c> or knownp[:<p>], got '" +
                     text + "'");
}

std::string to_string(const NormalizationChoice& choice) {
  switch (choice.policy.kind) {
    case NormalizationPolicy::Kind::kEmpiricalP:
      return "empirical";
    case NormalizationPolicy::Kind::kMaxDegree:
      return "maxdeg:" + format_real(choice.policy.value);
    case NormalizationPolicy::Kind::kKnownP:
      return choice.known_from_truth ? "knownp" : "knownp:" + format_real(choice.policy.value);
  }
  return "empirical";
}

void SweepConfig::validate() const {
  if (n_values.empty() || T_values.empty()) throw config_error("sweep needs n and T values");
  for (int n : n_values) {
    if (n < 2) throw config_error("sweep needs n >= 2");
  }
  for (int T : T_values) {
    if (T < 1) throw config_error("sweep needs T >= 1");
  }
  if (L < 1) throw config_error("sweep needs L >= 1");
  if (runs < 1) throw config_error("sweep needs runs >= 1");
  if (methods.empty()) throw config_error("sweep needs at least one method");
  if (jobs < 1) throw config_error("jobs must be >= 1");
  if (loocv_trials < 1) throw config_error("loocv_trials must be >= 1");
  if (p_lo && !(*p_lo > 0.0 && *p_lo <= 1.0)) throw config_error("p_lo must lie in (0, 1]");
  if (p_hi && !(*p_hi > 0.0 && *p_hi <= 1.0)) throw config_error("p_hi must lie in (0, 1]");
  if (p_lo && p_hi && *p_lo > *p_hi) throw config_error("p_lo must not exceed p_hi");
}

std::vector<std::pair<std::string, std::string>> SweepConfig::to_pairs() const {
  std::vector<std::string> method_names;
  for (Method m : methods) method_names.push_back(to_string(m));
  return {
      {"n", join(n_values)},
      {"T", join(T_values)},
      {"L", std::to_string(L)},
      {"runs", std::to_string(runs)},
      {"methods", join(method_names)},
      {"p_lo", p_lo ? format_real(*p_lo) : "auto"},
      {"p_hi", p_hi ? format_real(*p_hi) : "auto"},
      {"gp_mean_std", format_real(gp_mean_std)},
      {"delta", to_string(delta)},
      {"normalization", to_string(normalization)},
      {"loocv_trials", std::to_string(loocv_trials)},
      {"seed", std::to_string(seed)},
      {"jobs", std::to_string(jobs)},
  };
}

std::string SweepConfig::to_ini() const {
  std::ostringstream out;
  out << "[sweep]\n";
  for (const auto& [k, v] : to_pairs()) out << k << " = " << v << '\n';
  return out.str();
}

SweepConfig parse_sweep_config(const std::string& ini_text) {
  boost::property_tree::ptree tree;
  std::istringstream in(ini_text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw config_error(std::string("config: ") + e.what());
  }
  SweepConfig cfg;
  for (const auto& [section, body] : tree) {
    if (section != "sweep") throw config_error("config: unknown section [" + section + "]");
    for (const auto& [key, node] : body) {
      const std::string value = trim(node.get_value<std::string>());
      if (key == "n" || key == "T") {
        std::vector<int> values;
        for (const auto& item : split_list(value)) {
          values.push_back(static_cast<int>(to_int(item, key)));
        }
        (key == "n" ? cfg.n_values : cfg.T_values) = values;
      } else if (key == "L") {
        cfg.L = static_cast<int>(to_int(value, key));
      } else if (key == "runs") {
        cfg.runs = static_cast<int>(to_int(value, key));
      } else if (key == "methods") {
        cfg.methods.clear();
        for (const auto& item : split_list(value)) cfg.methods.push_back(parse_method(item));
      } else if (key == "p_lo" || key == "p_hi") {
        std::optional<double> p;
        if (value != "auto") p = to_real(value, key);
        (key == "p_lo" ? cfg.p_lo : cfg.p_hi) = p;
      } else if (key == "gp_mean_std") {
        cfg.gp_mean_std = to_real(value, key);
      } else if (key == "delta") {
        cfg.delta = parse_delta_policy(value);
      } else if (key == "normalization") {
        cfg.normalization = parse_normalization(value);
      } else if (key == "loocv_trials") {
        cfg.loocv_trials = static_cast<int>(to_int(value, key));
      } else if (key == "seed") {
        cfg.seed = static_cast<std::uint64_t>(to_int(value, key));
      } else if (key == "jobs") {
        cfg.jobs = static_cast<int>(to_int(value, key));
      } else {
        throw config_error("config: unknown key '" + key + "'");
      }
    }
  }
  cfg.validate();
  return cfg;
}

std::uint64_t cell_seed(std::uint64_t seed, int n, int T, int run) {
  return derive_seed(seed, Stream::kCell, static_cast<std::uint64_t>(n),
                     static_cast<std::uint64_t>(T), static_cast<std::uint64_t>(run));
}

double theory_rate_delta(int T) { return delta_star_l2(0.5, 1.0, 1, 1, 1.0, T); }

double theory_delta(const GroundTruth& truth, int grid_index, int n, int L) {
  const int T = truth.num_points() - 1;
  const double M = truth.lipschitz.value_or(lipschitz_diagnostic(truth.weights));
  const double b = condition_number_b(truth, grid_index);
  double p_min = 1.0;
  if (!truth.edge_probability.empty()) {
    p_min = *std::min_element(truth.edge_probability.begin(), truth.edge_probability.end());
  }
  return delta_star_l2(M, b, n, L, p_min, T);
}

std::pair<MleResult, double> mle_with_escalation(const ComparisonDataset& ds, double t,
                                                 double delta) {
  const int T = ds.intervals();
  double d = std::min(delta, static_cast<double>(std::max(T, 1)));
  for (;; d += 1.0) {
    const bool last = d >= T;
    if (last) d = std::max(static_cast<double>(T), 0.5);
    const double h = T > 0 ? d / T : 1.0;
    const SmoothedCounts counts = smooth_counts(ds, t, h, Kernel::kBoxcar);
    if (last || strongly_connected(counts.wins)) {
      return {mle_fit(counts, {}, std::nullopt, t), d};
    }
  }
}

namespace {

NormalizationPolicy resolve_normalization(const NormalizationChoice& choice,
                                          const ComparisonDataset& ds,
                                          const GroundTruth& truth, double t, double delta) {
  if (!choice.known_from_truth) return choice.policy;
  if (truth.edge_probability.empty()) {
    throw config_error("knownp without a value needs generator edge probabilities");
  }
  std::vector<double> p;
  for (int k : neighborhood_times(ds.grid(), t, delta)) p.push_back(truth.edge_probability[k]);
  return NormalizationPolicy::known_p(union_edge_probability(p));
}

}  // namespace

std::vector<CellResult> evaluate_dataset(const SweepConfig& cfg, const SynthData& data,
                                         int run, std::uint64_t seed) {
  const ComparisonDataset& ds = data.data;
  const int n = ds.n();
  const int T = ds.intervals();
  std::vector<CellResult> out;

  std::optional<double> loocv_delta;
  std::string loocv_failure;
  if (cfg.delta.kind == DeltaPolicy::Kind::kLoocv) {
    try {
      loocv_delta = loocv_select(ds, 1.0, default_candidates(T), cfg.loocv_trials, seed,
                                 Method::kDrc, {LoocvLoss::kSquared, cfg.normalization.policy})
                        .best_delta;
    } catch (const Error& e) {
      loocv_failure = e.what();
    }
  }

  for (int k = 0; k <= T; ++k) {
    const double t = ds.grid().point(k);
    const StrengthEstimate truth = normalized_truth(data.truth, k);
    double delta = 0.5;
    std::string delta_failure = loocv_failure;
    try {
      double start = 0.5;
      switch (cfg.delta.kind) {
        case DeltaPolicy::Kind::kTheory:
          start = theory_rate_delta(T);
          break;
        case DeltaPolicy::Kind::kTheoryPlugin:
          start = theory_delta(data.truth, k, n, cfg.L);
          break;
        case DeltaPolicy::Kind::kFixed:
          start = cfg.delta.fixed;
          break;
        case DeltaPolicy::Kind::kLoocv:
          if (!loocv_delta) throw estimation_error("LOOCV failed: " + loocv_failure);
          start = *loocv_delta;
          break;
      }
      delta = increase_delta_until_connected(ds, t, start);
      delta_failure.clear();
    } catch (const Error& e) {
      delta_failure = e.what();
    }

    for (Method method : cfg.methods) {
      CellResult cell;
      cell.method = method;
      cell.n = n;
      cell.T = T;
      cell.L = cfg.L;
      cell.run = run;
      cell.seed = seed;
      cell.grid_index = k;
      cell.t = t;
      cell.delta = delta;
      if (!delta_failure.empty()) {
        cell.failure = delta_failure;
        out.push_back(std::move(cell));
        continue;
      }
      try {
        switch (method) {
          case Method::kDrc: {
            const auto policy = resolve_normalization(cfg.normalization, ds, data.truth, t, delta);
            cell.record = evaluate(method, truth, dynamic_rank_centrality(ds, t, delta, policy));
            break;
          }
          case Method::kMle: {
            auto [fit, used] = mle_with_escalation(ds, t, delta);
            cell.delta = used;
            cell.record = evaluate(method, truth, fit.estimate);
            break;
          }
          case Method::kBorda: {
            const BordaResult b = borda_scores(ds, t, delta);
            StrengthEstimate est;
            est.t = t;
            est.pi = b.scores;
            est.ranking = b.ranking;
            cell.record = evaluate(method, truth, est, /*has_weights=*/false);
            break;
          }
        }
      } catch (const Error& e) {
        cell.failure = e.what();
      }
      out.push_back(std::move(cell));
    }
  }
  return out;
}

ExperimentReport run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  struct Unit {
    int n, T, run;
  };
  std::vector<Unit> units;
  for (int n : cfg.n_values) {
    for (int T : cfg.T_values) {
      for (int run = 0; run < cfg.runs; ++run) units.push_back({n, T, run});
    }
  }
  std::vector<std::vector<CellResult>> results(units.size());

  auto work = [&](std::size_t u) {
    const Unit& unit = units[u];
    const std::uint64_t seed = cell_seed(cfg.seed, unit.n, unit.T, unit.run);
    SynthConfig sc = SynthConfig::sparse_default(unit.n, unit.T, cfg.L, seed);
    if (cfg.p_lo) sc.p_lo = *cfg.p_lo;
    if (cfg.p_hi) sc.p_hi = *cfg.p_hi;
    sc.gp_mean_std = cfg.gp_mean_std;
    try {
      const SynthData data = generate(sc);
      results[u] = evaluate_dataset(cfg, data, unit.run, seed);
    } catch (const Error& e) {
      for (Method m : cfg.methods) {
        CellResult cell;
        cell.method = m;
        cell.n = unit.n;
        cell.T = unit.T;
        cell.L = cfg.L;
        cell.run = unit.run;
        cell.seed = seed;
        cell.grid_index = -1;
        cell.failure = std::string("generation failed: ") + e.what();
        results[u].push_back(std::move(cell));
      }
    }
  };

  const int workers = std::min<int>(cfg.jobs, static_cast<int>(units.size()));
  if (workers <= 1) {
    for (std::size_t u = 0; u < units.size(); ++u) work(u);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t u = next++; u < units.size(); u = next++) work(u);
      });
    }
  }

  ExperimentReport report;
  report.config = cfg.to_pairs();
  for (auto& r : results) {
    for (auto& c : r) report.cells.push_back(std::move(c));
  }
  return report;
}

}  // namespace drc

// drc: command-line front end for dynamic ranking experiments.
//
//   drc sweep    --config sweep.ini --out-dir results
//   drc rank     season.csv --at 1.0 --delta loocv
//   drc estimate data.drc --t 0.5 --delta fixed:4
//   drc generate --n 50 --T 20 --out data.drc
//   drc loocv    data.drc --t 1.0
//
// Exit codes: 0 ok, 2 bad configuration, 3 bad data, 4 estimation failure.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "drc/bandwidth.hpp"
#include "drc/baselines.hpp"
#include "drc/error.hpp"
#include "drc/experiment.hpp"
#include "drc/io.hpp"
#include "drc/spectral.hpp"
#include "drc/synth.hpp"

namespace {

using namespace drc;
using Json = nlohmann::ordered_json;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig:
      return 2;
    case ErrorKind::kData:
      return 3;
    case ErrorKind::kEstimation:
      return 4;
  }
  return 1;
}

std::vector<Method> parse_methods(const std::string& text) {
  std::vector<Method> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(parse_method(item));
  }
  if (out.empty()) throw config_error("no method given");
  return out;
}

std::vector<double> parse_candidates(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(parse_real(item));
  }
  return out;
}

// ----------------------------------------------------------------- sweep

struct SweepArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  std::string format = "csv";
  std::optional<int> jobs;
  std::string delta;
  std::string method;
  std::string normalization;
  bool emit_config = false;
};

int run_sweep_cmd(const SweepArgs& a) {
  SweepConfig cfg = a.config.empty() ? SweepConfig{} : parse_sweep_config(read_file(a.config));
  if (a.seed) cfg.seed = *a.seed;
  if (a.jobs) cfg.jobs = *a.jobs;
  if (!a.delta.empty()) cfg.delta = parse_delta_policy(a.delta);
  if (!a.method.empty()) cfg.methods = parse_methods(a.method);
  if (!a.normalization.empty()) cfg.normalization = parse_normalization(a.normalization);
  cfg.validate();
  if (a.emit_config) {
    std::cout << cfg.to_ini();
    return 0;
  }
  const ReportFormat format = parse_report_format(a.format);

  const ExperimentReport report = run_sweep(cfg);
  std::error_code ec;
  std::filesystem::create_directories(a.out_dir, ec);
  if (ec) throw config_error("cannot create " + a.out_dir + ": " + ec.message());
  const std::filesystem::path dir(a.out_dir);
  const auto report_path = dir / (format == ReportFormat::kCsv ? "report.csv" : "report.json");
  emit_report(report, report_path, format);
  write_file(dir / "cells.csv", format_cells(report));

  std::size_t failed = 0;
  for (const auto& c : report.cells) failed += c.record ? 0 : 1;
  std::cout << "cells " << report.cells.size() << " failed " << failed << '\n';
  for (const auto& r : report.aggregate()) {
    std::printf("%-6s n=%-4d T=%-4d %-9s mean=%.4f std=%.4f\n", to_string(r.method).c_str(),
                r.n, r.T, r.statistic.c_str(), r.mean, r.stddev);
  }
  std::cout << "wrote " << report_path.string() << " and " << (dir / "cells.csv").string()
            << '\n';
  return 0;
}

// ------------------------------------------------------------------ rank

struct RankArgs {
  std::string matches;
  std::string season;
  double at = 1.0;
  std::string delta = "loocv";
  std::string method = "drc";
  std::string normalization = "empirical";
  std::uint64_t seed = 1;
  int trials = 200;
  int top = 10;
  std::string reference;
  std::string format = "csv";
};

int run_rank_cmd(const RankArgs& a) {
  const MatchData m = load_matches(
      a.matches, a.season.empty() ? std::nullopt : std::optional<std::string>(a.season));
  const ComparisonDataset& ds = m.data;
  const Method method = parse_method(a.method);
  const DeltaPolicy policy = parse_delta_policy(a.delta);
  const NormalizationChoice norm = parse_normalization(a.normalization);
  if (norm.known_from_truth) throw config_error("knownp needs a value for match data");
  if (!(a.at >= 0.0 && a.at <= 1.0)) throw config_error("--at must lie in [0, 1]");
  const int T = ds.intervals();

  double start = 0.5;
  switch (policy.kind) {
    case DeltaPolicy::Kind::kTheory:
      start = theory_rate_delta(std::max(T, 1));
      break;
    case DeltaPolicy::Kind::kTheoryPlugin:
      throw config_error("theory-plugin needs ground truth; use theory, loocv or fixed");
    case DeltaPolicy::Kind::kFixed:
      start = policy.fixed;
      break;
    case DeltaPolicy::Kind::kLoocv:
      start = loocv_select(ds, a.at, default_candidates(std::max(T, 1)), a.trials, a.seed,
                           method, {LoocvLoss::kSquared, norm.policy})
                  .best_delta;
      break;
  }
  double delta = increase_delta_until_connected(ds, a.at, start);
  StrengthEstimate est;
  std::vector<int> uncompared;
  switch (method) {
    case Method::kDrc:
      est = dynamic_rank_centrality(ds, a.at, delta, norm.policy);
      break;
    case Method::kMle: {
      auto [fit, used] = mle_with_escalation(ds, a.at, delta);
      est = fit.estimate;
      delta = used;
      break;
    }
    case Method::kBorda: {
      const BordaResult b = borda_scores(ds, a.at, delta);
      est.t = a.at;
      est.pi = b.scores;
      est.ranking = b.ranking;
      uncompared = b.uncompared;
      break;
    }
  }

  std::map<std::string, int> reference;
  if (!a.reference.empty()) {
    for (const auto& [name, rank] : load_reference_ranks(a.reference)) reference[name] = rank;
  }
  const int shown = std::min<int>(a.top, static_cast<int>(est.ranking.size()));

  if (a.format == "json") {
    Json doc;
    doc["season"] = m.season;
    doc["t"] = a.at;
    doc["method"] = to_string(method);
    doc["delta_start"] = start;
    doc["delta"] = delta;
    doc["ranking"] = Json::array();
    for (int r = 0; r < static_cast<int>(est.ranking.size()); ++r) {
      const int i = est.ranking[r];
      Json row;
      row["rank"] = r + 1;
      row["team"] = m.names[i];
      row["score"] = est.pi(i);
      if (auto it = reference.find(m.names[i]); it != reference.end()) {
        row["reference_rank"] = it->second;
      }
      doc["ranking"].push_back(row);
    }
    std::cout << doc.dump(2) << '\n';
    return 0;
  }
  if (a.format != "csv") throw config_error("format must be csv or json");

  std::cout << "season " << m.season << "  t=" << a.at << "  method=" << to_string(method)
            << "\nchosen delta " << format_real(start) << " (used " << format_real(delta)
            << " after connectivity check)\n\n";
  std::printf("%4s  %-24s %10s%s\n", "rank", "team", "score", reference.empty() ? "" : "  ref");
  for (int r = 0; r < shown; ++r) {
    const int i = est.ranking[r];
    std::printf("%4d  %-24s %10.6f", r + 1, m.names[i].c_str(), est.pi(i));
    if (!reference.empty()) {
      auto it = reference.find(m.names[i]);
      if (it != reference.end()) {
        std::printf("  %3d", it->second);
      } else {
        std::printf("  %3s", "-");
      }
    }
    std::printf("\n");
  }
  for (int i : uncompared) std::cout << "note: " << m.names[i] << " never played in window\n";
  return 0;
}

// -------------------------------------------------------------- estimate

struct EstimateArgs {
  std::string dataset;
  double t = 0.0;
  std::string delta = "theory";
  std::string method = "drc";
  std::string normalization = "empirical";
  std::string format = "csv";
};

double explicit_delta(const std::string& text, int T) {
  if (text == "theory") return theory_rate_delta(std::max(T, 1));
  if (text.rfind("fixed:", 0) == 0) return parse_delta_policy(text).fixed;
  return parse_delta_policy("fixed:" + text).fixed;
}

int run_estimate_cmd(const EstimateArgs& a) {
  const auto [ds, truth] = load_dataset(a.dataset);
  const Method method = parse_method(a.method);
  if (!(a.t >= 0.0 && a.t <= 1.0)) throw config_error("--t must lie in [0, 1]");
  const double delta = explicit_delta(a.delta, ds.intervals());
  NormalizationChoice norm = parse_normalization(a.normalization);
  if (norm.known_from_truth) {
    if (!truth || truth->edge_probability.empty()) {
      throw config_error("knownp without a value needs stored edge probabilities");
    }
    std::vector<double> p;
    for (int k : neighborhood_times(ds.grid(), a.t, delta)) {
      p.push_back(truth->edge_probability[k]);
    }
    norm.policy = NormalizationPolicy::known_p(union_edge_probability(p));
  }

  const NeighborhoodView view = neighborhood(ds, a.t, delta);
  const GraphDiagnostics g = diagnostics(view, ds.n());
  const double pairs = ds.n() * (ds.n() - 1) / 2.0;

  Json doc;
  doc["t"] = a.t;
  doc["delta"] = view.delta;
  doc["delta_clamped"] = view.delta_clamped;
  doc["method"] = to_string(method);
  doc["grid_points"] = view.times.size();
  doc["d_min"] = g.d_min;
  doc["d_max"] = g.d_max;
  doc["n_edges"] = g.n_edges;
  doc["p_hat"] = g.n_edges / pairs;
  doc["connected"] = g.connected;
  doc["spectral_gap"] = g.spectral_gap ? Json(*g.spectral_gap) : Json(nullptr);

  StrengthEstimate est;
  switch (method) {
    case Method::kDrc: {
      const DrcResult r = dynamic_rank_centrality_detailed(ds, a.t, delta, norm.policy);
      est = r.estimate;
      doc["d_norm"] = r.d_norm;
      doc["iterations"] = r.iteration.iterations;
      doc["lazy"] = r.iteration.lazy;
      break;
    }
    case Method::kMle: {
      const MleResult r = mle_estimate(ds, a.t, delta);
      est = r.estimate;
      doc["iterations"] = r.iterations;
      doc["objective"] = r.objective;
      break;
    }
    case Method::kBorda:
      est = borda_estimate(ds, a.t, delta);
      break;
  }
  std::optional<StrengthEstimate> true_pi;
  if (truth) {
    const int k = static_cast<int>(std::lround(a.t * ds.intervals()));
    if (std::abs(ds.grid().point(k) - a.t) <= kGridSlack) true_pi = normalized_truth(*truth, k);
  }
  const auto positions = rank_positions(est.ranking);

  if (a.format == "json") {
    doc["items"] = Json::array();
    for (int i = 0; i < ds.n(); ++i) {
      Json row;
      row["item"] = i;
      row["pi"] = est.pi(i);
      row["rank"] = positions[i] + 1;
      if (true_pi) row["pi_true"] = true_pi->pi(i);
      doc["items"].push_back(row);
    }
    std::cout << doc.dump(2) << '\n';
    return 0;
  }
  if (a.format != "csv") throw config_error("format must be csv or json");
  for (const auto& [key, value] : doc.items()) {
    std::cout << key << ' ' << (value.is_string() ? value.get<std::string>() : value.dump()) << '\n';
  }
  std::cout << (true_pi ? "item,pi,rank,pi_true\n" : "item,pi,rank\n");
  for (int i = 0; i < ds.n(); ++i) {
    std::cout << i << ',' << format_real(est.pi(i)) << ',' << positions[i] + 1;
    if (true_pi) std::cout << ',' << format_real(true_pi->pi(i));
    std::cout << '\n';
  }
  return 0;
}

// -------------------------------------------------------------- generate

struct GenerateArgs {
  int n = 50;
  int T = 10;
  int L = 5;
  std::optional<double> p_lo;
  std::optional<double> p_hi;
  std::uint64_t seed = 1;
  std::string out;
  std::string weights;
  double p = 0.5;
  bool noiseless = false;
};

SynthData synthesize(const GenerateArgs& a) {
  if (a.weights.empty()) {
    SynthConfig cfg = SynthConfig::sparse_default(a.n, a.T, a.L, a.seed);
    if (a.p_lo) cfg.p_lo = *a.p_lo;
    if (a.p_hi) cfg.p_hi = *a.p_hi;
    return generate(cfg);
  }
  const std::vector<double> w = parse_candidates(a.weights);
  if (!a.noiseless) {
    return make_constant_weights(static_cast<int>(w.size()), a.T, a.L, w, a.p, a.seed);
  }
  std::vector<int> iw;
  for (double v : w) {
    if (v != std::floor(v) || v < 1) throw config_error("noiseless weights must be integers >= 1");
    iw.push_back(static_cast<int>(v));
  }
  return make_noiseless(static_cast<int>(iw.size()), a.T, iw, a.p, a.seed);
}

int run_generate_cmd(const GenerateArgs& a) {
  const SynthData data = synthesize(a);
  save_dataset(data.data, &data.truth, a.out);
  std::cout << "wrote " << a.out << ": n=" << data.data.n() << " T=" << data.data.intervals()
            << " records=" << data.data.num_records() << " graph_retries=" << data.graph_retries
            << '\n';
  return 0;
}

// ----------------------------------------------------------------- loocv

struct LoocvArgs {
  std::string dataset;
  double t = 1.0;
  std::string candidates;
  int trials = 200;
  std::uint64_t seed = 1;
  std::string method = "drc";
  std::string loss = "squared";
  std::string normalization = "empirical";
};

int run_loocv_cmd(const LoocvArgs& a) {
  const auto [ds, truth] = load_dataset(a.dataset);
  std::vector<double> candidates = a.candidates.empty()
                                       ? default_candidates(std::max(ds.intervals(), 1))
                                       : parse_candidates(a.candidates);
  LoocvOptions opts;
  if (a.loss == "absolute") {
    opts.loss = LoocvLoss::kAbsolute;
  } else if (a.loss != "squared") {
    throw config_error("loss must be squared or absolute");
  }
  const NormalizationChoice norm = parse_normalization(a.normalization);
  if (norm.known_from_truth) throw config_error("knownp needs a value here");
  opts.normalization = norm.policy;
  const LoocvResult r =
      loocv_select(ds, a.t, candidates, a.trials, a.seed, parse_method(a.method), opts);
  std::cout << "delta,mean_squared,mean_absolute,evaluated,skipped,feasible\n";
  for (const auto& s : r.scores) {
    std::cout << format_real(s.delta) << ',' << format_real(s.mean_squared) << ','
              << format_real(s.mean_absolute) << ',' << s.evaluated << ',' << s.skipped << ','
              << (s.feasible ? "yes" : "no") << '\n';
  }
  std::cout << "best_delta " << format_real(r.best_delta) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic Rank Centrality: ranking from timestamped pairwise comparisons"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "drc 1.0");

  SweepArgs sweep;
  auto* s = app.add_subcommand("sweep", "Monte-Carlo sweep over synthetic data");
  s->add_option("--config", sweep.config, "INI file with a [sweep] section")->check(CLI::ExistingFile);
  s->add_option("--seed", sweep.seed, "Master seed");
  s->add_option("--out-dir", sweep.out_dir, "Directory for report and per-cell files");
  s->add_option("--format", sweep.format, "Report format")->check(CLI::IsMember({"csv", "json"}));
  s->add_option("--jobs", sweep.jobs, "Worker threads");
  s->add_option("--delta", sweep.delta, "theory | theory-plugin | loocv | fixed:<v>");
  s->add_option("--method", sweep.method, "Comma-separated subset of drc,mle,borda");
  s->add_option("--normalization", sweep.normalization, "empirical | maxdeg:<c> | knownp[:<p>]");
  s->add_flag("--emit-config", sweep.emit_config, "Print the effective config and exit");

  RankArgs rank;
  auto* r = app.add_subcommand("rank", "Rank teams from a match file");
  r->add_option("matches", rank.matches, "CSV: season,round,team_i,team_j,winner")
      ->required()
      ->check(CLI::ExistingFile);
  r->add_option("--season", rank.season, "Season to use when the file holds several");
  r->add_option("--at", rank.at, "Query time in [0, 1]");
  r->add_option("--delta", rank.delta, "theory | loocv | fixed:<v>");
  r->add_option("--method", rank.method, "drc | mle | borda");
  r->add_option("--normalization", rank.normalization, "empirical | maxdeg:<c> | knownp:<p>");
  r->add_option("--seed", rank.seed, "LOOCV seed");
  r->add_option("--trials", rank.trials, "LOOCV held-out games");
  r->add_option("--top", rank.top, "Rows to print");
  r->add_option("--reference", rank.reference, "name,rank CSV shown alongside")
      ->check(CLI::ExistingFile);
  r->add_option("--format", rank.format, "csv (table) | json")->check(CLI::IsMember({"csv", "json"}));

  EstimateArgs estimate;
  auto* e = app.add_subcommand("estimate", "Estimate strengths at one time point");
  e->add_option("dataset", estimate.dataset, "Dataset file")->required()->check(CLI::ExistingFile);
  e->add_option("--t", estimate.t, "Query time in [0, 1]");
  e->add_option("--delta", estimate.delta, "theory | fixed:<v> | <v>");
  e->add_option("--method", estimate.method, "drc | mle | borda");
  e->add_option("--normalization", estimate.normalization, "empirical | maxdeg:<c> | knownp[:<p>]");
  e->add_option("--format", estimate.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Write a synthetic dataset");
  g->add_option("--n", gen.n, "Items");
  g->add_option("--T", gen.T, "Grid intervals");
  g->add_option("--L", gen.L, "Comparisons per edge");
  g->add_option("--p-lo", gen.p_lo, "Lowest edge probability (default 1/n)");
  g->add_option("--p-hi", gen.p_hi, "Highest edge probability (default log(n)/n)");
  g->add_option("--seed", gen.seed, "Seed");
  g->add_option("--weights", gen.weights, "Comma-separated constant weights instead of GP paths");
  g->add_option("--p", gen.p, "Edge probability with --weights");
  g->add_flag("--noiseless", gen.noiseless, "Record exact win probabilities (integer weights)");
  g->add_option("--out", gen.out, "Output path")->required();

  LoocvArgs loocv;
  auto* l = app.add_subcommand("loocv", "Score candidate radii by leave-one-out prediction");
  l->add_option("dataset", loocv.dataset, "Dataset file")->required()->check(CLI::ExistingFile);
  l->add_option("--t", loocv.t, "Query time");
  l->add_option("--candidates", loocv.candidates, "Comma-separated radii");
  l->add_option("--trials", loocv.trials, "Held-out games");
  l->add_option("--seed", loocv.seed, "Seed");
  l->add_option("--method", loocv.method, "drc | mle | borda");
  l->add_option("--loss", loocv.loss, "squared | absolute");
  l->add_option("--normalization", loocv.normalization, "empirical | maxdeg:<c> | knownp:<p>");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*s) return run_sweep_cmd(sweep);
    if (*r) return run_rank_cmd(rank);
    if (*e) return run_estimate_cmd(estimate);
    if (*g) return run_generate_cmd(gen);
    if (*l) return run_loocv_cmd(loocv);
  } catch (const Error& err) {
    std::cerr << "error: " << err.what() << '\n';
    return exit_code(err.kind());
  }
  return 0;
}

#include "drc/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <tuple>

#include "json.hpp"

#include "drc/error.hpp"

namespace drc {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(trim(field));
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(line);
  }
  return out;
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

long parse_int(const std::string& text, const std::string& what) {
  long value = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw data_error("expected an integer for " + what + ", got '" + text + "'");
  }
  return value;
}

}  // namespace

std::string format_real(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw data_error("cannot format real");
  return std::string(buf, ptr);
}

double parse_real(const std::string& text) {
  double value = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw data_error("expected a real number, got '" + text + "'");
  }
  return value;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw config_error("cannot write " + path.string());
  out << contents;
  if (!out) throw config_error("write failed for " + path.string());
}

// ---------------------------------------------------------------- matches

MatchData parse_matches(const std::string& text, const std::optional<std::string>& season) {
  const std::vector<std::string> lines = lines_of(text);
  if (lines.empty() || trim(lines[0]) != "season,round,team_i,team_j,winner") {
    throw data_error("line 1: expected header season,round,team_i,team_j,winner");
  }
  struct Row {
    std::string season;
    int round;
    std::string a, b;
    bool b_won;
  };
  std::vector<Row> rows;
  std::vector<std::string> seasons;
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    if (trim(lines[ln]).empty()) continue;
    const std::string where = "line " + std::to_string(ln + 1) + ": ";
    const auto f = split(lines[ln], ',');
    if (f.size() != 5) throw data_error(where + "expected 5 fields");
    Row r;
    r.season = f[0];
    try {
      r.round = static_cast<int>(parse_int(f[1], "round"));
    } catch (const Error& e) {
      throw data_error(where + e.what());
    }
    if (r.round < 1) throw data_error(where + "round must be >= 1");
    r.a = f[2];
    r.b = f[3];
    if (r.a.empty() || r.b.empty()) throw data_error(where + "empty team name");
    if (r.a == r.b) throw data_error(where + "a team cannot play itself");
    if (f[4] == "i" || f[4] == r.a) {
      r.b_won = false;
    } else if (f[4] == "j" || f[4] == r.b) {
      r.b_won = true;
    } else {
      throw data_error(where + "unknown winner token '" + f[4] + "'");
    }
    if (std::find(seasons.begin(), seasons.end(), r.season) == seasons.end()) {
      seasons.push_back(r.season);
    }
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw data_error("match file holds no games");

  std::string chosen;
  if (season) {
    if (std::find(seasons.begin(), seasons.end(), *season) == seasons.end()) {
      throw config_error("season '" + *season + "' not present in match file");
    }
    chosen = *season;
  } else if (seasons.size() == 1) {
    chosen = seasons[0];
  } else {
    std::string list;
    for (const auto& s : seasons) list += (list.empty() ? "" : ", ") + s;
    throw config_error("match file holds several seasons (" + list + "); select one");
  }

  MatchData out{ComparisonDataset::Builder(1, 0).build(), {}, chosen};
  std::map<std::string, int> index;
  int rounds = 0;
  for (const Row& r : rows) {
    if (r.season != chosen) continue;
    for (const auto& name : {r.a, r.b}) {
      if (index.emplace(name, static_cast<int>(out.names.size())).second) {
        out.names.push_back(name);
      }
    }
    rounds = std::max(rounds, r.round);
  }
  if (out.names.size() < 2) throw data_error("season needs at least two teams");
  ComparisonDataset::Builder builder(static_cast<int>(out.names.size()), rounds - 1);
  for (const Row& r : rows) {
    if (r.season != chosen) continue;
    builder.add(r.round - 1, index[r.a], index[r.b], r.b_won ? 1 : 0, 1);
  }
  out.data = builder.build();
  return out;
}

MatchData load_matches(const std::filesystem::path& path,
                       const std::optional<std::string>& season) {
  return parse_matches(read_file(path), season);
}

MatchData canonicalize_by_name(const MatchData& matches) {
  const int n = matches.data.n();
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return matches.names[a] < matches.names[b]; });
  std::vector<int> new_index(static_cast<std::size_t>(n));
  MatchData out{matches.data, {}, matches.season};
  for (int r = 0; r < n; ++r) {
    new_index[order[r]] = r;
    out.names.push_back(matches.names[order[r]]);
  }
  ComparisonDataset::Builder builder(n, matches.data.intervals(),
                                     matches.data.comparisons_per_edge());
  for (int k = 0; k <= matches.data.intervals(); ++k) {
    for (const Comparison& c : matches.data.at(k)) {
      builder.add(k, new_index[c.i], new_index[c.j], c.wins, c.trials);
    }
  }
  out.data = builder.build();
  return out;
}

std::vector<std::pair<std::string, int>> load_reference_ranks(
    const std::filesystem::path& path) {
  std::vector<std::pair<std::string, int>> out;
  const auto lines = lines_of(read_file(path));
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    if (trim(lines[ln]).empty()) continue;
    const auto f = split(lines[ln], ',');
    if (ln == 0 && f.size() == 2 && f[0] == "name" && f[1] == "rank") continue;
    if (f.size() != 2) {
      throw data_error("line " + std::to_string(ln + 1) + ": expected name,rank");
    }
    out.emplace_back(f[0], static_cast<int>(parse_int(f[1], "rank")));
  }
  return out;
}

// ---------------------------------------------------------------- datasets

std::string serialize_dataset(const ComparisonDataset& ds, const GroundTruth* truth) {
  std::ostringstream out;
  out << "drc-dataset " << kDatasetFormatVersion << '\n';
  out << "n " << ds.n() << '\n';
  out << "T " << ds.intervals() << '\n';
  out << "L " << ds.comparisons_per_edge() << '\n';
  for (int k = 0; k <= ds.intervals(); ++k) {
    const auto records = ds.at(k);
    out << "time " << k << ' ' << records.size() << '\n';
    for (const Comparison& c : records) {
      out << c.i << ' ' << c.j << ' ' << c.wins << ' ' << c.trials << '\n';
    }
  }
  if (truth != nullptr) {
    out << "truth " << truth->weights.rows() << ' ' << truth->weights.cols() << '\n';
    for (Eigen::Index r = 0; r < truth->weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < truth->weights.cols(); ++c) {
        out << (c ? " " : "") << format_real(truth->weights(r, c));
      }
      out << '\n';
    }
    out << "lipschitz "
        << (truth->lipschitz ? format_real(*truth->lipschitz) : std::string("none")) << '\n';
    out << "edge_probability " << truth->edge_probability.size();
    for (double p : truth->edge_probability) out << ' ' << format_real(p);
    out << '\n';
  }
  std::string body = out.str();
  std::ostringstream sum;
  sum << "checksum " << std::hex << std::setw(16) << std::setfill('0') << fnv1a(body)
      << '\n';
  return body + sum.str();
}

std::pair<ComparisonDataset, std::optional<GroundTruth>> parse_dataset(
    const std::string& text) {
  const auto marker = text.rfind("checksum ");
  if (marker == std::string::npos || (marker != 0 && text[marker - 1] != '\n')) {
    throw data_error("dataset file has no checksum line");
  }
  const std::string body = text.substr(0, marker);
  std::ostringstream expected;
  expected << std::hex << std::setw(16) << std::setfill('0') << fnv1a(body);
  if (trim(text.substr(marker + 9)) != expected.str()) {
    throw data_error("dataset checksum mismatch");
  }

  const auto lines = lines_of(body);
  std::size_t ln = 0;
  auto next_fields = [&](const std::string& key, std::size_t count) {
    if (ln >= lines.size()) throw data_error("dataset file ends before '" + key + "'");
    auto f = split(lines[ln], ' ');
    if (f.empty() || (!key.empty() && f[0] != key) || (count && f.size() != count)) {
      throw data_error("line " + std::to_string(ln + 1) + ": expected '" + key + "'");
    }
    ++ln;
    return f;
  };

  const auto header = next_fields("drc-dataset", 2);
  if (parse_int(header[1], "version") != kDatasetFormatVersion) {
    throw data_error("dataset format version " + header[1] + " is not supported");
  }
  const int n = static_cast<int>(parse_int(next_fields("n", 2)[1], "n"));
  const int T = static_cast<int>(parse_int(next_fields("T", 2)[1], "T"));
  const int L = static_cast<int>(parse_int(next_fields("L", 2)[1], "L"));
  if (L < 1) throw data_error("L must be >= 1");
  ComparisonDataset::Builder builder(n, T, L);
  for (int k = 0; k <= T; ++k) {
    const auto f = next_fields("time", 3);
    if (parse_int(f[1], "time") != k) throw data_error("time blocks out of order");
    const long count = parse_int(f[2], "record count");
    for (long r = 0; r < count; ++r) {
      const auto e = next_fields("", 4);
      builder.add(k, static_cast<int>(parse_int(e[0], "i")),
                  static_cast<int>(parse_int(e[1], "j")),
                  static_cast<int>(parse_int(e[2], "wins")),
                  static_cast<int>(parse_int(e[3], "trials")));
    }
  }
  std::optional<GroundTruth> truth;
  if (ln < lines.size() && !trim(lines[ln]).empty()) {
    const auto f = next_fields("truth", 3);
    const long rows = parse_int(f[1], "rows");
    const long cols = parse_int(f[2], "cols");
    GroundTruth gt;
    gt.weights.resize(rows, cols);
    for (long r = 0; r < rows; ++r) {
      const auto values = next_fields("", static_cast<std::size_t>(cols));
      for (long c = 0; c < cols; ++c) gt.weights(r, c) = parse_real(values[c]);
    }
    const auto lip = next_fields("lipschitz", 2);
    if (lip[1] != "none") gt.lipschitz = parse_real(lip[1]);
    const auto probs = next_fields("edge_probability", 0);
    const long count = parse_int(probs.at(1), "edge probability count");
    if (static_cast<long>(probs.size()) != count + 2) {
      throw data_error("edge_probability count mismatch");
    }
    for (long k = 0; k < count; ++k) gt.edge_probability.push_back(parse_real(probs[k + 2]));
    truth = std::move(gt);
  }
  return {builder.build(), std::move(truth)};
}

void save_dataset(const ComparisonDataset& ds, const GroundTruth* truth,
                  const std::filesystem::path& path) {
  write_file(path, serialize_dataset(ds, truth));
}

std::pair<ComparisonDataset, std::optional<GroundTruth>> load_dataset(
    const std::filesystem::path& path) {
  return parse_dataset(read_file(path));
}

// ---------------------------------------------------------------- reports

std::vector<ReportRow> ExperimentReport::aggregate() const {
  using Key = std::tuple<std::string, int, int, int, std::string>;
  struct Acc {
    Method method;
    std::vector<double> values;
    std::size_t failed = 0;
  };
  std::map<Key, Acc> groups;
  static const char* kStats[] = {"d_metric", "rel_l2", "rel_linf"};
  for (const CellResult& cell : cells) {
    const std::string m = to_string(cell.method);
    for (const char* stat : kStats) {
      // Borda only produces a ranking.
      if (cell.method == Method::kBorda && std::string_view(stat) != "d_metric") continue;
      Acc& acc = groups.try_emplace(Key{m, cell.n, cell.T, cell.L, stat},
                                    Acc{cell.method, {}, 0})
                     .first->second;
      if (!cell.record) {
        ++acc.failed;
        continue;
      }
      const std::string s = stat;
      if (s == "d_metric") {
        acc.values.push_back(cell.record->d_metric);
      } else if (s == "rel_l2" && cell.record->rel_l2) {
        acc.values.push_back(*cell.record->rel_l2);
      } else if (s == "rel_linf" && cell.record->rel_linf) {
        acc.values.push_back(*cell.record->rel_linf);
      }
    }
  }
  std::vector<ReportRow> rows;
  for (const auto& [key, acc] : groups) {
    ReportRow row;
    row.method = acc.method;
    std::tie(std::ignore, row.n, row.T, row.L, row.statistic) = key;
    row.count = acc.values.size();
    row.failed = acc.failed;
    if (!acc.values.empty()) {
      double sum = 0.0;
      for (double v : acc.values) sum += v;
      row.mean = sum / static_cast<double>(acc.values.size());
      if (acc.values.size() > 1) {
        double ss = 0.0;
        for (double v : acc.values) ss += (v - row.mean) * (v - row.mean);
        row.stddev = std::sqrt(ss / static_cast<double>(acc.values.size() - 1));
      }
    }
    rows.push_back(row);
  }
  return rows;
}

ReportFormat parse_report_format(const std::string& text) {
  if (text == "csv") return ReportFormat::kCsv;
  if (text == "json") return ReportFormat::kJson;
  throw config_error("unknown report format '" + text + "' (csv, json)");
}

std::string format_report(const ExperimentReport& report, ReportFormat format) {
  const auto rows = report.aggregate();
  if (format == ReportFormat::kCsv) {
    std::ostringstream out;
    out << "method,n,T,L,statistic,mean,std,count,failed\n";
    for (const auto& r : rows) {
      out << to_string(r.method) << ',' << r.n << ',' << r.T << ',' << r.L << ','
          << r.statistic << ',' << format_real(r.mean) << ',' << format_real(r.stddev)
          << ',' << r.count << ',' << r.failed << '\n';
    }
    return out.str();
  }
  nlohmann::ordered_json doc;
  doc["config"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : report.config) doc["config"][k] = v;
  doc["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json row;
    row["method"] = to_string(r.method);
    row["n"] = r.n;
    row["T"] = r.T;
    row["L"] = r.L;
    row["statistic"] = r.statistic;
    row["mean"] = r.mean;
    row["std"] = r.stddev;
    row["count"] = r.count;
    row["failed"] = r.failed;
    doc["rows"].push_back(std::move(row));
  }
  return doc.dump(2) + "\n";
}

void emit_report(const ExperimentReport& report, const std::filesystem::path& path,
                 ReportFormat format) {
  write_file(path, format_report(report, format));
}

std::string format_cells(const ExperimentReport& report) {
  std::ostringstream out;
  out << "method,n,T,L,run,seed,grid_index,t,delta,d_metric,rel_l2,rel_linf,status\n";
  for (const CellResult& c : report.cells) {
    out << to_string(c.method) << ',' << c.n << ',' << c.T << ',' << c.L << ',' << c.run
        << ',' << c.seed << ',' << c.grid_index << ',' << format_real(c.t) << ','
        << format_real(c.delta) << ',';
    if (c.record) {
      out << format_real(c.record->d_metric) << ','
          << (c.record->rel_l2 ? format_real(*c.record->rel_l2) : "") << ','
          << (c.record->rel_linf ? format_real(*c.record->rel_linf) : "") << ",ok\n";
    } else {
      std::string reason = c.failure;
      std::replace(reason.begin(), reason.end(), ',', ';');
      std::replace(reason.begin(), reason.end(), '\n', ' ');
      out << ",,,failed: " << reason << '\n';
    }
  }
  return out.str();
}

}  // namespace drc

#include "netspec/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "netspec/errors.hpp"

namespace netspec {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw ConfigError("bad CSV number '" + s + "'");
  return v;
}

void require_header(const CsvTable& t, const std::vector<std::string>& expected) {
  if (t.header != expected) throw ConfigError("unexpected CSV header");
  for (const auto& r : t.rows)
    if (r.size() != expected.size()) throw ConfigError("ragged CSV row");
}

std::size_t as_index(double x) { return static_cast<std::size_t>(std::llround(x)); }

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == std::floor(x) && std::abs(x) < 1e15) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.0f", x);
    return buf;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty CSV");
  t.header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    for (const auto& cell : split(line)) row.push_back(parse_double(cell));
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  return read_csv(in);
}

void write_csv(std::ostream& out, const CsvTable& table) {
  for (std::size_t k = 0; k < table.header.size(); ++k) {
    out << (k ? "," : "") << table.header[k];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << format_double(row[k]);
    out << '\n';
  }
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  write_csv(out, table);
}

CsvTable stage1_trace_table(const std::vector<std::vector<double>>& trace) {
  CsvTable t{{"node_id", "t", "y_value"}, {}};
  if (trace.empty()) return t;
  const std::size_t n = trace.front().size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t r = 0; r < trace.size(); ++r)
      t.rows.push_back({static_cast<double>(i + 1), static_cast<double>(r), trace[r][i]});
  return t;
}

std::vector<std::vector<double>> stage1_trace_from_table(const CsvTable& t) {
  require_header(t, {"node_id", "t", "y_value"});
  std::size_t n = 0, rounds = 0;
  for (const auto& r : t.rows) {
    n = std::max(n, as_index(r[0]));
    rounds = std::max(rounds, as_index(r[1]) + 1);
  }
  std::vector<std::vector<double>> trace(rounds, std::vector<double>(n, 0.0));
  for (const auto& r : t.rows) trace[as_index(r[1])][as_index(r[0]) - 1] = r[2];
  return trace;
}

CsvTable flow_trace_table(const FlowTrace& trace) {
  CsvTable t{{"t", "node_id", "coeff_index", "estimate", "V"}, {}};
  const std::size_t n = trace.node_count;
  for (const FlowSample& s : trace.samples)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t l = 0; l < n; ++l)
        t.rows.push_back({s.t, static_cast<double>(i + 1), static_cast<double>(l), s.x[i * n + l],
                          s.v});
  return t;
}

FlowTrace flow_trace_from_table(const CsvTable& t) {
  require_header(t, {"t", "node_id", "coeff_index", "estimate", "V"});
  FlowTrace trace;
  std::size_t n = 0;
  for (const auto& r : t.rows) n = std::max(n, as_index(r[1]));
  trace.node_count = n;
  for (const auto& r : t.rows) {
    if (trace.samples.empty() || trace.samples.back().t != r[0]) {
      trace.samples.push_back({r[0], std::vector<double>(n * n, 0.0), r[4]});
    }
    trace.samples.back().x[(as_index(r[1]) - 1) * n + as_index(r[2])] = r[3];
  }
  return trace;
}

CsvTable spectrum_table(const SpectrumTrace& trace) {
  CsvTable t{{"t", "node_id", "root_index", "re", "im"}, {}};
  for (const SpectrumEstimate& e : trace.estimates)
    for (std::size_t k = 0; k < e.roots.size(); ++k)
      t.rows.push_back({e.t, static_cast<double>(e.node), static_cast<double>(k), e.roots[k].re,
                        e.roots[k].im});
  return t;
}

std::vector<SpectrumEstimate> spectrum_from_table(const CsvTable& t) {
  require_header(t, {"t", "node_id", "root_index", "re", "im"});
  std::vector<SpectrumEstimate> out;
  for (const auto& r : t.rows) {
    const NodeId node = as_index(r[1]);
    if (out.empty() || out.back().t != r[0] || out.back().node != node) {
      out.push_back({node, r[0], {}});
    }
    out.back().roots.push_back({r[3], r[4]});
  }
  return out;
}

CsvTable sweep_table(const SweepReport& report) {
  CsvTable t{{"a", "trial", "rank", "condition", "spectrum_error"}, {}};
  for (const SweepTrial& s : report.trials)
    t.rows.push_back({s.magnitude, static_cast<double>(s.trial), static_cast<double>(s.rank),
                      s.condition, s.spectrum_error});
  return t;
}

std::vector<SweepTrial> sweep_from_table(const CsvTable& t) {
  require_header(t, {"a", "trial", "rank", "condition", "spectrum_error"});
  std::vector<SweepTrial> out;
  for (const auto& r : t.rows) out.push_back({r[0], as_index(r[1]), as_index(r[2]), r[3], r[4]});
  return out;
}

}  // namespace netspec

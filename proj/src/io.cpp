#include "causal/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "causal/error.hpp"
#include "json.hpp"

namespace causal {

using nlohmann::json;

namespace {

[[noreturn]] void fail(std::string_view source, const std::string& what) {
  throw ParseError(std::string(source) + ": " + what);
}

[[noreturn]] void fail_at(std::string_view source, std::size_t line, const std::string& what) {
  throw ParseError(std::string(source) + ":" + std::to_string(line) + ": " + what);
}

std::size_t line_of(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(byte), '\n'));
}

json parse_json(std::string_view text, std::string_view source) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
    auto msg = std::string(e.what());
    if (auto pos = msg.find("syntax error"); pos != std::string::npos) msg = msg.substr(pos);
    fail_at(source, line_of(text, byte), msg);
  }
}

// Wraps field access so that type and shape errors name the JSON path.
template <class Fn>
auto guarded(std::string_view source, Fn&& fn) {
  try {
    return fn();
  } catch (const json::exception& e) {
    fail(source, std::string("invalid model: ") + e.what());
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    fail(source, e.what());
  }
}

const json& field(const json& obj, const char* key, const std::string& path, std::string_view source) {
  if (!obj.is_object()) fail(source, path + " must be an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(source, "missing field '" + path + (path.empty() ? "" : ".") + key + "'");
  return *it;
}

Dag dag_from(const json& j, std::string_view source) {
  const json& g = j.contains("dag") ? j.at("dag") : j;
  const auto nodes = field(g, "nodes", "dag", source).get<std::vector<std::string>>();
  std::vector<Edge> edges;
  if (g.contains("edges")) {
    for (const auto& e : g.at("edges")) {
      if (!e.is_array() || e.size() != 2) fail(source, "each edge must be a [source, target] pair");
      edges.push_back({e.at(0).get<std::string>(), e.at(1).get<std::string>()});
    }
  }
  return Dag(nodes, edges);
}

std::map<std::string, double> named_values(const json& j, const std::vector<std::string>& names,
                                           const char* what, std::string_view source) {
  std::map<std::string, double> out;
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = it.value().get<double>();
  } else if (j.is_array()) {
    if (j.size() != names.size()) fail(source, std::string(what) + " has the wrong length");
    for (std::size_t i = 0; i < names.size(); ++i) out[names[i]] = j.at(i).get<double>();
  } else {
    fail(source, std::string(what) + " must be an object or an array");
  }
  return out;
}

Eigen::MatrixXd matrix_from(const json& j, std::size_t d, std::string_view source) {
  if (!j.is_array() || j.size() != d) fail(source, "coefficient matrix must have " + std::to_string(d) + " rows");
  Eigen::MatrixXd m(static_cast<long>(d), static_cast<long>(d));
  for (std::size_t r = 0; r < d; ++r) {
    if (!j.at(r).is_array() || j.at(r).size() != d) {
      fail(source, "coefficient matrix row " + std::to_string(r) + " must have " + std::to_string(d) + " entries");
    }
    for (std::size_t c = 0; c < d; ++c) m(static_cast<long>(r), static_cast<long>(c)) = j.at(r).at(c).get<double>();
  }
  return m;
}

json dag_json(const Dag& dag) {
  json edges = json::array();
  for (const auto& e : dag.edges()) edges.push_back({e.source, e.target});
  return {{"nodes", dag.nodes()}, {"edges", edges}};
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_row(std::string_view line) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = line.find(',');
    out.push_back(trim(line.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    line.remove_prefix(comma + 1);
  }
  return out;
}

double parse_double(std::string_view cell, std::string_view source, std::size_t line) {
  double v = 0.0;
  const auto* end = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(cell.data(), end, v);
  if (ec != std::errc() || ptr != end || cell.empty()) {
    fail_at(source, line, "not a number: '" + std::string(cell) + "'");
  }
  if (!std::isfinite(v)) fail_at(source, line, "non-finite value '" + std::string(cell) + "'");
  return v;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;
};

Table parse_table(std::string_view text, std::string_view source) {
  Table t;
  std::size_t line_no = 0;
  bool have_header = false;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const std::string_view line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto cells = split_row(line);
    if (!have_header) {
      for (auto c : cells) {
        if (c.size() >= 2 && c.front() == '"' && c.back() == '"') c = c.substr(1, c.size() - 2);
        if (c.empty()) fail_at(source, line_no, "empty column name");
        t.header.emplace_back(c);
      }
      t.columns.assign(t.header.size(), {});
      have_header = true;
      continue;
    }
    if (cells.size() != t.header.size()) {
      fail_at(source, line_no, "expected " + std::to_string(t.header.size()) + " fields, found " +
                                   std::to_string(cells.size()));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) t.columns[c].push_back(parse_double(cells[c], source, line_no));
  }
  if (!have_header) fail(source, "missing header row");
  return t;
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Dag parse_dag(std::string_view text, std::string_view source) {
  const json j = parse_json(text, source);
  return guarded(source, [&] { return dag_from(j, source); });
}

DiscreteModel parse_discrete_model(std::string_view text, std::string_view source) {
  const json j = parse_json(text, source);
  return guarded(source, [&] {
    Dag dag = dag_from(j, source);
    const auto cards = field(j, "cardinalities", "", source).get<std::map<std::string, std::size_t>>();
    const json& cpts = field(j, "cpts", "", source);
    if (!cpts.is_object()) fail(source, "'cpts' must be an object keyed by node");
    std::vector<Cpt> tables;
    for (auto it = cpts.begin(); it != cpts.end(); ++it) {
      const std::string node = it.key();
      const auto parents = it.value().value("parents", std::vector<std::string>{});
      const auto table = field(it.value(), "table", "cpts." + node, source).get<std::vector<std::vector<double>>>();
      auto card_of = [&](const std::string& v) {
        auto c = cards.find(v);
        if (c == cards.end()) fail(source, "no cardinality for '" + v + "'");
        return c->second;
      };
      std::vector<std::size_t> pc;
      for (const auto& p : parents) pc.push_back(card_of(p));
      try {
        tables.emplace_back(node, card_of(node), parents, pc, table);
      } catch (const Error& e) {
        fail(source, std::string("cpts.") + node + ": " + e.what());
      }
    }
    return DiscreteModel(std::move(dag), cards, std::move(tables));
  });
}

LinearSem parse_linear_sem(std::string_view text, std::string_view source) {
  const json j = parse_json(text, source);
  return guarded(source, [&] {
    Dag dag = dag_from(j, source);
    std::map<Edge, double> coef;
    if (j.contains("coefficients")) {
      for (const auto& c : j.at("coefficients")) {
        if (!c.is_array() || c.size() != 3) fail(source, "each coefficient must be [source, target, value]");
        Edge e{c.at(0).get<std::string>(), c.at(1).get<std::string>()};
        if (!coef.emplace(e, c.at(2).get<double>()).second) fail(source, "duplicate coefficient for " + to_string(e));
      }
    }
    const auto noise = named_values(field(j, "noise_vars", "", source), dag.nodes(), "noise_vars", source);
    return LinearSem(std::move(dag), coef, noise);
  });
}

VarModel parse_var_model(std::string_view text, std::string_view source) {
  const json j = parse_json(text, source);
  return guarded(source, [&] {
    VarModel m;
    m.names = field(j, "names", "", source).get<std::vector<std::string>>();
    const std::size_t d = m.names.size();
    const json& coef = field(j, "coefficients", "", source);
    const bool single = coef.is_array() && !coef.empty() && coef.at(0).is_array() && !coef.at(0).empty() &&
                        coef.at(0).at(0).is_number();
    if (single) {
      m.lags.push_back(matrix_from(coef, d, source));
    } else {
      for (const auto& b : coef) m.lags.push_back(matrix_from(b, d, source));
    }
    const auto noise = named_values(field(j, "noise_vars", "", source), m.names, "noise_vars", source);
    m.noise_vars = Eigen::VectorXd(static_cast<long>(d));
    for (std::size_t i = 0; i < d; ++i) {
      auto it = noise.find(m.names[i]);
      if (it == noise.end()) fail(source, "no noise variance for '" + m.names[i] + "'");
      m.noise_vars(static_cast<long>(i)) = it->second;
    }
    m.validate();
    return m;
  });
}

Dag load_dag(const std::string& path) { return parse_dag(read_file(path), path); }
DiscreteModel load_discrete_model(const std::string& path) { return parse_discrete_model(read_file(path), path); }
LinearSem load_linear_sem(const std::string& path) { return parse_linear_sem(read_file(path), path); }
VarModel load_var_model(const std::string& path) { return parse_var_model(read_file(path), path); }

std::string to_json(const DiscreteModel& model) {
  json cards = json::object();
  json cpts = json::object();
  const auto& nodes = model.dag().nodes();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    cards[nodes[i]] = model.cardinalities()[i];
    const Cpt& c = model.cpts()[i];
    json rows = json::array();
    for (std::size_t r = 0; r < c.row_count(); ++r) {
      const auto row = c.row(r);
      rows.push_back(std::vector<double>(row.begin(), row.end()));
    }
    cpts[nodes[i]] = {{"parents", c.parents()}, {"table", rows}};
  }
  return json{{"dag", dag_json(model.dag())}, {"cardinalities", cards}, {"cpts", cpts}}.dump(2);
}

std::string to_json(const LinearSem& sem) {
  json coef = json::array();
  for (const auto& [e, v] : sem.coefficients()) coef.push_back({e.source, e.target, v});
  json noise = json::object();
  for (const auto& n : sem.dag().nodes()) noise[n] = sem.noise_variance(n);
  return json{{"dag", dag_json(sem.dag())}, {"coefficients", coef}, {"noise_vars", noise}}.dump(2);
}

std::string to_json(const VarModel& model) {
  json lags = json::array();
  for (const auto& b : model.lags) {
    json m = json::array();
    for (long r = 0; r < b.rows(); ++r) {
      std::vector<double> row;
      for (long c = 0; c < b.cols(); ++c) row.push_back(b(r, c));
      m.push_back(row);
    }
    lags.push_back(m);
  }
  std::vector<double> noise(model.noise_vars.data(), model.noise_vars.data() + model.noise_vars.size());
  return json{{"names", model.names}, {"coefficients", lags}, {"noise_vars", noise}}.dump(2);
}

SampleMatrix parse_samples_csv(std::string_view text, std::string_view source) {
  Table t = parse_table(text, source);
  const std::size_t n = t.columns.empty() ? 0 : t.columns[0].size();
  SampleMatrix s{t.header, Eigen::MatrixXd(static_cast<long>(t.header.size()), static_cast<long>(n))};
  for (std::size_t v = 0; v < t.header.size(); ++v)
    for (std::size_t c = 0; c < n; ++c) s.data(static_cast<long>(v), static_cast<long>(c)) = t.columns[v][c];
  try {
    s.validate();
  } catch (const Error& e) {
    fail(source, e.what());
  }
  return s;
}

SampleMatrix load_samples_csv(const std::string& path) { return parse_samples_csv(read_file(path), path); }

void write_samples_csv(std::ostream& out, const SampleMatrix& samples) {
  for (std::size_t v = 0; v < samples.variables.size(); ++v) out << (v ? "," : "") << samples.variables[v];
  out << '\n';
  for (long c = 0; c < samples.data.cols(); ++c) {
    for (long v = 0; v < samples.data.rows(); ++v) out << (v ? "," : "") << format_number(samples.data(v, c));
    out << '\n';
  }
}

Trajectory parse_trajectory_csv(std::string_view text, std::string_view source) {
  Table t = parse_table(text, source);
  if (t.header.empty() || t.header[0] != "t") fail(source, "first column of a trajectory must be 't'");
  if (t.header.size() < 2) fail(source, "trajectory has no components");
  const std::size_t n = t.columns[0].size();
  Trajectory traj{std::vector<std::string>(t.header.begin() + 1, t.header.end()),
                  Eigen::MatrixXd(static_cast<long>(t.header.size() - 1), static_cast<long>(n))};
  for (std::size_t c = 1; c < t.header.size(); ++c)
    for (std::size_t k = 0; k < n; ++k) traj.data(static_cast<long>(c - 1), static_cast<long>(k)) = t.columns[c][k];
  return traj;
}

Trajectory load_trajectory_csv(const std::string& path) { return parse_trajectory_csv(read_file(path), path); }

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << 't';
  for (const auto& n : traj.names) out << ',' << n;
  out << '\n';
  for (long k = 0; k < traj.data.cols(); ++k) {
    out << k;
    for (long c = 0; c < traj.data.rows(); ++c) out << ',' << format_number(traj.data(c, k));
    out << '\n';
  }
}

}  // namespace causal

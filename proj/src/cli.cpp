#include "causal/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "causal/discrete.hpp"
#include "causal/error.hpp"
#include "causal/estimation.hpp"
#include "causal/gaussian.hpp"
#include "causal/io.hpp"
#include "causal/reference_models.hpp"
#include "causal/timeseries.hpp"

namespace causal::cli {

namespace {

using Cells = std::vector<std::string>;

struct Options {
  std::string model;
  std::string data;
  std::string edges;
  std::vector<std::string> measures;
  std::string base;
  std::string out;
  std::string do_spec;
  std::string target = "Y";
  std::string trajectory_out;
  std::string repro_target;
  std::size_t knn_r = 4;
  double ridge_lambda = 0.0;
  bool ridge_given = false;
  std::uint64_t seed = 0;
  double split = 0.5;
  std::size_t seeds = 0;  // 0: subcommand default
  std::size_t count = 1000;
  std::size_t length = 50000;
  std::size_t lag = 0;
  std::size_t stride = 0;
  std::size_t burn_in = 1000;
  std::size_t jobs = 0;
  bool clamp = false;
};

// One output row: identifying cells that are always filled and a deferred
// computation of the remaining cells.
struct Job {
  Cells keys;
  std::function<Cells()> values;
};

struct Table {
  Cells header;
  std::vector<Cells> rows;
  bool failed = false;
};

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

void write_table(std::ostream& out, const Table& t) {
  auto line = [&](const Cells& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << csv_field(cells[i]);
    out << '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
}

std::size_t job_count(const Options& o) {
  if (o.jobs > 0) return o.jobs;
  return std::max(1u, std::thread::hardware_concurrency());
}

// Evaluates the jobs in parallel; rows keep the order of `jobs`.
Table evaluate(Cells key_header, const Cells& value_header, std::vector<Job> jobs, std::size_t threads) {
  Table t;
  t.header = std::move(key_header);
  t.header.insert(t.header.end(), value_header.begin(), value_header.end());
  t.header.push_back("error");
  t.rows.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next++) < jobs.size();) {
      Cells row = jobs[i].keys;
      Cells vals;
      std::string error;
      try {
        vals = jobs[i].values();
        if (vals.size() != value_header.size()) throw std::logic_error("row width mismatch");
      } catch (const std::exception& e) {
        vals.assign(value_header.size(), "");
        error = e.what();
        if (error.empty()) error = "failed";
      }
      row.insert(row.end(), vals.begin(), vals.end());
      row.push_back(error);
      t.rows[i] = std::move(row);
    }
  };
  threads = std::min(threads, jobs.size());
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < threads; ++k) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  t.failed = std::any_of(t.rows.begin(), t.rows.end(), [](const Cells& r) { return !r.back().empty(); });
  return t;
}

std::string num(double v) { return format_number(v); }

std::string num(std::size_t v) { return std::to_string(v); }

// Independent seeds for the simulation and the estimator of one row.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

LogBase base_or(const Options& o, LogBase fallback) { return o.base.empty() ? fallback : parse_log_base(o.base); }

EstimationConfig estimation_config(const Options& o, LogBase base) {
  EstimationConfig cfg;
  if (o.ridge_given) cfg.ridge_lambda = o.ridge_lambda;
  cfg.knn_r = o.knn_r;
  cfg.split_fraction = o.split;
  cfg.seed = o.seed;
  cfg.base = base;
  return cfg;
}

// Selector grammar: sets separated by '|'; each is "all-single-arrows",
// "all-into:<node>", "all-arrows", an explicit list "A->B,C->B", or "{}".
std::vector<EdgeSet> resolve_edge_sets(const Dag& dag, const std::string& spec) {
  std::vector<EdgeSet> out;
  std::string text = spec.empty() ? "all-single-arrows" : spec;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, '|')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item == "all-single-arrows") {
      for (auto& s : all_single_arrows(dag)) out.push_back(std::move(s));
    } else if (item.rfind("all-into:", 0) == 0) {
      const std::string node = item.substr(9);
      if (!dag.contains(node)) throw UsageError("--edges: unknown node '" + node + "'");
      out.push_back(all_into(dag, node));
    } else if (item == "all-arrows") {
      const auto edges = dag.edges();
      out.emplace_back(edges.begin(), edges.end());
    } else if (item == "∅") {
      out.emplace_back();
    } else {
      out.push_back(parse_edge_list(item));
    }
  }
  if (out.empty()) throw UsageError("--edges selects no edge sets");
  return out;
}

Selection sources_of(const EdgeSet& s) {
  Selection out;
  for (const auto& e : s)
    if (std::find(out.begin(), out.end(), e.source) == out.end()) out.push_back(e.source);
  return out;
}

Selection split_names(const std::string& text) {
  Selection out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Sum over targets of I(X_j; cut parents | kept parents).
double cut_parent_cmi(const DiscreteModel& m, const EdgeSet& s, LogBase base) {
  validate_edges(m.dag(), s);
  const JointTable p = joint_from_model(m);
  double total = 0.0;
  for (const auto& [target, part] : group_by_target(s)) {
    const auto split = split_parents(m.dag(), target, part);
    total += conditional_mutual_information(p, {target}, split.cut, split.kept, base);
  }
  return total;
}

double discrete_measure(const DiscreteModel& m, const EdgeSet& s, const std::string& measure,
                        const Selection& condition, LogBase base) {
  if (measure == "causal-strength") return causal_strength(m, s, base);
  if (measure == "observed-influence") return observed_influence(m, s, base);
  if (measure == "cmi") return cut_parent_cmi(m, s, base);
  if (measure == "info-flow-se") return source_exclusion_flow(m, s, base);
  if (measure == "info-flow-ap") {
    validate_edges(m.dag(), s);
    return information_flow(m, sources_of(s), s.targets(), condition, base);
  }
  if (measure == "ace") {
    if (s.size() != 1) throw UsageError("ace is defined for a single arrow");
    validate_edges(m.dag(), s);
    return ace(m, s.begin()->source, s.begin()->target);
  }
  if (measure == "te") throw UsageError("te needs a time-series model; use the timeseries subcommand");
  throw UsageError("unknown measure '" + measure + "'");
}

// I(A;B|C) of a Gaussian with covariance `sigma`.
double gaussian_cmi(const Covariance& sigma, const Selection& a, const Selection& b, const Selection& c) {
  auto logdet = [&](Selection vars) {
    if (vars.empty()) return 0.0;
    const Eigen::MatrixXd m = sigma.restricted(vars).matrix;
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) throw NumericError("covariance is not positive definite");
    return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  };
  auto join = [](Selection x, const Selection& y) {
    x.insert(x.end(), y.begin(), y.end());
    return x;
  };
  return 0.5 * (logdet(join(a, c)) + logdet(join(b, c)) - logdet(c) - logdet(join(join(a, b), c)));
}

double linear_measure(const LinearSem& sem, const EdgeSet& s, const std::string& measure, LogBase base) {
  if (measure == "causal-strength") return causal_strength_linear(sem, s, base);
  if (measure == "cmi") {
    validate_edges(sem.dag(), s);
    const Covariance sigma = observational_covariance(sem);
    double total = 0.0;
    for (const auto& [target, part] : group_by_target(s)) {
      const auto split = split_parents(sem.dag(), target, part);
      total += gaussian_cmi(sigma, {target}, split.cut, split.kept);
    }
    return from_nats(total, base);
  }
  throw UsageError("measure '" + measure + "' is not available for linear models");
}

std::vector<std::string> measures_or_default(const Options& o) {
  return o.measures.empty() ? std::vector<std::string>{"causal-strength"} : o.measures;
}

Table cmd_strength_discrete(const Options& o) {
  const DiscreteModel m = load_discrete_model(o.model);
  const LogBase base = base_or(o, LogBase::bits);
  const auto sets = resolve_edge_sets(m.dag(), o.edges);
  const auto measures = measures_or_default(o);
  const Selection condition = split_names(o.do_spec);
  std::vector<Job> jobs;
  for (const auto& s : sets) {
    for (const auto& measure : measures) {
      jobs.push_back({{to_string(s), measure}, [&m, s, measure, &condition, base] {
                        const double v = discrete_measure(m, s, measure, condition, base);
                        return Cells{num(v), measure == "ace" ? std::string() : std::string(to_string(base))};
                      }});
    }
  }
  return evaluate({"edge_set", "measure"}, {"value", "unit"}, std::move(jobs), job_count(o));
}

Table cmd_strength_linear(const Options& o) {
  const LinearSem sem = load_linear_sem(o.model);
  const LogBase base = base_or(o, LogBase::nats);
  const auto sets = resolve_edge_sets(sem.dag(), o.edges);
  std::vector<Job> jobs;
  for (const auto& s : sets) {
    for (const auto& measure : measures_or_default(o)) {
      jobs.push_back({{to_string(s), measure}, [&sem, s, measure, base] {
                        return Cells{num(linear_measure(sem, s, measure, base)), std::string(to_string(base))};
                      }});
    }
  }
  return evaluate({"edge_set", "measure"}, {"value", "unit"}, std::move(jobs), job_count(o));
}

// A model file for `estimate` is a full SEM (enabling the computed column)
// or just a graph.
struct GraphOrSem {
  Dag dag;
  std::optional<LinearSem> sem;
};

GraphOrSem load_graph_or_sem(const std::string& path) {
  const std::string text = read_file(path);
  if (text.find("\"noise_vars\"") != std::string::npos) {
    LinearSem sem = parse_linear_sem(text, path);
    Dag dag = sem.dag();
    return {std::move(dag), std::move(sem)};
  }
  return {parse_dag(text, path), std::nullopt};
}

Table cmd_estimate(const Options& o) {
  const GraphOrSem model = load_graph_or_sem(o.model);
  const SampleMatrix data = load_samples_csv(o.data);
  const LogBase base = base_or(o, LogBase::nats);
  const auto sets = resolve_edge_sets(model.dag, o.edges);
  const std::size_t seeds = o.seeds ? o.seeds : 1;
  std::vector<Job> jobs;
  for (const auto& s : sets) {
    for (std::size_t k = 0; k < seeds; ++k) {
      EstimationConfig cfg = estimation_config(o, base);
      cfg.seed = o.seed + k;
      jobs.push_back({{to_string(s), num(cfg.seed)}, [&, s, cfg] {
                        double est = estimate_causal_strength(data, model.dag, s, cfg);
                        if (o.clamp) est = std::max(est, 0.0);
                        const std::string computed =
                            model.sem ? num(causal_strength_linear(*model.sem, s, base)) : std::string();
                        return Cells{num(est), computed, std::string(to_string(base))};
                      }});
    }
  }
  return evaluate({"edge_set", "seed"}, {"estimated", "computed", "unit"}, std::move(jobs), job_count(o));
}

int cmd_simulate_linear(const Options& o, std::ostream& out) {
  const LinearSem sem = load_linear_sem(o.model);
  write_samples_csv(out, simulate_linear(sem, o.count, o.seed));
  return 0;
}

Table cmd_timeseries(const Options& o) {
  const LogBase base = base_or(o, LogBase::nats);
  std::optional<VarModel> model;
  if (!o.model.empty()) model = load_var_model(o.model);
  const std::size_t p = o.lag ? o.lag : (model ? model->order() : 1);
  const std::size_t seeds = o.seeds ? o.seeds : 1;

  std::vector<Trajectory> trajectories;
  std::vector<std::uint64_t> traj_seeds;
  if (!o.data.empty()) {
    trajectories.push_back(load_trajectory_csv(o.data));
    traj_seeds.push_back(o.seed);
  } else {
    if (!model) throw UsageError("timeseries needs --model or --data");
    for (std::size_t k = 0; k < seeds; ++k) {
      traj_seeds.push_back(o.seed + k);
      trajectories.push_back(simulate_var(*model, o.length, o.seed + k, o.burn_in));
    }
  }
  if (!o.trajectory_out.empty()) {
    std::ofstream f(o.trajectory_out);
    if (!f) throw UsageError("cannot write " + o.trajectory_out);
    write_trajectory_csv(f, trajectories.front());
  }

  std::vector<Job> jobs;
  for (std::size_t k = 0; k < trajectories.size(); ++k) {
    EstimationConfig cfg = estimation_config(o, base);
    cfg.seed = derive_seed(traj_seeds[k], 1);
    const Trajectory* traj = &trajectories[k];
    jobs.push_back({{o.target, num(p), num(traj->length()), num(traj_seeds[k])}, [&, traj, cfg] {
                      const double est = estimate_strength_ts(*traj, p, o.target, cfg, o.stride);
                      std::string computed, te;
                      if (model) {
                        computed = num(exact_strength_var(*model, o.target, base));
                        te = num(transfer_entropy_var(*model, o.target, base));
                      }
                      return Cells{num(est), computed, te, std::string(to_string(base))};
                    }});
  }
  return evaluate({"target", "lag", "length", "seed"}, {"estimated", "computed", "transfer_entropy", "unit"},
                  std::move(jobs), job_count(o));
}

// ---------------------------------------------------------------- repro --

std::vector<double> grid(double lo, double hi, std::size_t points) {
  std::vector<double> g;
  for (std::size_t i = 0; i < points; ++i) {
    g.push_back(points == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1));
  }
  return g;
}

double h2_bits(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1 - p) * std::log2(1 - p);
}

LinearSem pair_sem(double a) {
  return LinearSem(Dag({"X1", "X2"}, {{"X1", "X2"}}), {{{"X1", "X2"}, a}}, {{"X1", 1.0}, {"X2", 1.0}});
}

Table repro_fig6(const Options& o) {
  const LogBase base = base_or(o, LogBase::nats);
  const std::size_t seeds = o.seeds ? o.seeds : 10;
  const EdgeSet s{{"X1", "X2"}};
  std::vector<Job> jobs;
  for (std::size_t count : {std::size_t{1000}, std::size_t{2000}}) {
    for (std::size_t ai = 1; ai <= 10; ++ai) {
      const double a = static_cast<double>(ai) / 5.0;
      for (std::size_t k = 0; k < seeds; ++k) {
        const std::uint64_t seed = o.seed + k;
        jobs.push_back({{num(a), num(count), num(seed)}, [=, &o] {
                          const LinearSem sem = pair_sem(a);
                          EstimationConfig cfg = estimation_config(o, base);
                          cfg.seed = derive_seed(seed, 1);
                          const auto data = simulate_linear(sem, count, derive_seed(seed, 0));
                          return Cells{num(estimate_causal_strength(data, sem.dag(), s, cfg)),
                                       num(causal_strength_linear(sem, s, base)), std::string(to_string(base))};
                        }});
      }
    }
  }
  return evaluate({"a", "count", "seed"}, {"estimated", "computed", "unit"}, std::move(jobs), job_count(o));
}

Table repro_fig7(const Options& o) {
  const LogBase base = base_or(o, LogBase::nats);
  const std::size_t seeds = o.seeds ? o.seeds : 5;
  std::vector<Job> jobs;
  for (std::size_t n : {std::size_t{3}, std::size_t{6}}) {
    for (std::size_t d = 0; d < 100; ++d) {
      const std::uint64_t model_seed = derive_seed(o.seed, 1000 * n + d);
      const auto sem = std::make_shared<LinearSem>(reference::random_complete_sem(n, model_seed));
      for (const auto& s : all_single_arrows(sem->dag())) {
        for (std::size_t k = 0; k < seeds; ++k) {
          const std::uint64_t seed = o.seed + k;
          jobs.push_back({{num(n), num(d), to_string(s), num(seed)}, [=, &o] {
                            EstimationConfig cfg = estimation_config(o, base);
                            cfg.seed = derive_seed(model_seed ^ seed, 1);
                            const auto data = simulate_linear(*sem, o.count, derive_seed(model_seed ^ seed, 0));
                            return Cells{num(estimate_causal_strength(data, sem->dag(), s, cfg)),
                                         num(causal_strength_linear(*sem, s, base)), std::string(to_string(base))};
                          }});
        }
      }
    }
  }
  return evaluate({"nodes", "dag", "edge", "seed"}, {"estimated", "computed", "unit"}, std::move(jobs),
                  job_count(o));
}

Table repro_fig9(const Options& o) {
  const LogBase base = base_or(o, LogBase::nats);
  const std::size_t seeds = o.seeds ? o.seeds : 5;
  std::vector<Job> jobs;
  for (std::size_t length : {std::size_t{5000}, std::size_t{50000}}) {
    for (std::size_t m = 1; m <= 10; ++m) {
      const double eps = std::ldexp(1.0, -static_cast<int>(m));
      for (std::size_t k = 0; k < seeds; ++k) {
        const std::uint64_t seed = o.seed + k;
        jobs.push_back({{num(m), num(eps), num(length), num(seed)}, [=, &o] {
                          const VarModel model = coupled_ar1(eps);
                          EstimationConfig cfg = estimation_config(o, base);
                          cfg.seed = derive_seed(seed, 1);
                          const auto traj = simulate_var(model, length, derive_seed(seed, 0), o.burn_in);
                          return Cells{num(estimate_strength_ts(traj, 1, "Y", cfg, o.stride)),
                                       num(exact_strength_var(model, "Y", base)),
                                       num(transfer_entropy_var(model, "Y", base)), std::string(to_string(base))};
                        }});
      }
    }
  }
  return evaluate({"m", "eps", "length", "seed"}, {"estimated", "computed", "transfer_entropy", "unit"},
                  std::move(jobs), job_count(o));
}

Table repro_example7(const Options& o) {
  const LogBase base = base_or(o, LogBase::bits);
  std::vector<Job> jobs;
  for (double eps : grid(0.0, 0.5, 11)) {
    jobs.push_back({{num(eps)}, [=] {
                      const auto closed = exact_perturbed_copy(eps, base);
                      const auto te_chain = unroll_bivariate_chain(reference::perturbed_copy_chain(eps, 4));
                      const auto cs_chain = unroll_bivariate_chain(reference::perturbed_copy_chain(eps, 3));
                      const EdgeSet into_y{{cs_chain.x[2], cs_chain.y[3]}};
                      return Cells{num(closed.transfer_entropy), num(closed.causal_strength),
                                   num(transfer_entropy_exact(te_chain, 3, base)),
                                   num(causal_strength(cs_chain.model, into_y, base)), std::string(to_string(base))};
                    }});
  }
  return evaluate({"eps"}, {"te", "cs", "te_enumerated", "cs_enumerated", "unit"}, std::move(jobs), job_count(o));
}

Table repro_xor(const Options& o) {
  const LogBase base = base_or(o, LogBase::bits);
  const double unit = base == LogBase::bits ? 1.0 : std::log(2.0);
  std::vector<Job> jobs;
  for (double a : grid(0.0, 0.5, 11)) {
    jobs.push_back({{num(a)}, [=] {
                      const DiscreteModel m = reference::xor_confounded(a);
                      const EdgeSet s{{"X", "Y"}};
                      const EdgeSet t{{"X", "Y"}, {"Z", "Y"}};
                      const EdgeSet s_zx{{"Z", "X"}};
                      const EdgeSet t_zx{{"Z", "X"}, {"X", "Y"}};
                      const auto p = joint_from_model(m);
                      return Cells{num(causal_strength(m, s, base)),
                                   num(causal_strength(m, t, base)),
                                   num(h2_bits(a) * unit),
                                   num(-std::log2(a * a + (1 - a) * (1 - a)) * unit),
                                   num(causal_strength(m, s_zx, base)),
                                   num(causal_strength(m, t_zx, base)),
                                   num(conditional_mutual_information(p, {"X"}, {"Y"}, {"Z"}, base)),
                                   std::string(to_string(base))};
                    }});
  }
  return evaluate({"a"}, {"cs", "ct", "cs_formula", "ct_formula", "cs_zx", "ct_zx_xy", "cmi_xy_given_z", "unit"},
                  std::move(jobs), job_count(o));
}

Table repro_code(const Options& o) {
  const LogBase base = base_or(o, LogBase::bits);
  std::vector<Job> jobs;
  for (std::size_t k = 1; k <= 3; ++k) {
    for (std::size_t removed = 0; removed <= 2 * k + 1; ++removed) {
      jobs.push_back({{num(k), num(removed)}, [=] {
                        const DiscreteModel m = reference::repetition_code(k);
                        EdgeSet s;
                        for (std::size_t i = 1; i <= removed; ++i) s.insert({"B" + std::to_string(i), "D"});
                        return Cells{num(causal_strength(m, s, base)), std::string(to_string(base))};
                      }});
    }
  }
  return evaluate({"k", "removed"}, {"strength", "unit"}, std::move(jobs), job_count(o));
}

Table repro_broadcast(const Options& o) {
  const LogBase base = base_or(o, LogBase::bits);
  std::vector<Job> jobs;
  for (std::size_t n = 1; n <= 6; ++n) {
    jobs.push_back({{num(n)}, [=] {
                      const DiscreteModel m = reference::broadcast(n);
                      const auto edges = m.dag().edges();
                      const EdgeSet all(edges.begin(), edges.end());
                      return Cells{num(causal_strength(m, all, base)), num(causal_strength(m, {edges.front()}, base)),
                                   std::string(to_string(base))};
                    }});
  }
  return evaluate({"n"}, {"strength_all", "strength_single", "unit"}, std::move(jobs), job_count(o));
}

const std::map<std::string, std::function<Table(const Options&)>>& repro_table() {
  static const std::map<std::string, std::function<Table(const Options&)>> t{
      {"fig6", repro_fig6}, {"fig7", repro_fig7},   {"fig9", repro_fig9},          {"example7", repro_example7},
      {"xor", repro_xor},   {"code", repro_code}, {"broadcast", repro_broadcast}};
  return t;
}

void add_common(CLI::App* app, Options& o) {
  app->add_option("--out", o.out, "Write CSV to this file instead of stdout");
  app->add_option("--base", o.base, "Log base of reported values (bits|nats)")
      ->check(CLI::IsMember({"bits", "nats"}));
  app->add_option("--jobs", o.jobs, "Worker threads (default: hardware concurrency)");
}

void add_estimation(CLI::App* app, Options& o) {
  app->add_option("--knn-r", o.knn_r, "Neighbour rank of the divergence estimator")->check(CLI::PositiveNumber);
  app->add_option_function<double>(
         "--ridge-lambda",
         [&o](double v) {
           o.ridge_lambda = v;
           o.ridge_given = true;
         },
         "Ridge penalty (default 1e-3 * count)")
      ->check(CLI::NonNegativeNumber);
  app->add_option("--seed", o.seed, "Random seed");
  app->add_option("--split", o.split, "Share of samples used as the observational part")
      ->check(CLI::Range(0.0, 1.0));
}

}  // namespace

const std::vector<std::string>& repro_targets() {
  static const std::vector<std::string> names{"fig6", "fig7", "fig9", "example7", "xor", "code", "broadcast"};
  return names;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Causal strength of arrow sets in causal Bayesian networks", "causal-strength"};
  app.require_subcommand(1);

  auto* sd = app.add_subcommand("strength-discrete", "Exact measures on a discrete model");
  sd->add_option("--model", o.model, "Discrete model JSON")->required()->check(CLI::ExistingFile);
  sd->add_option("--edges", o.edges, "Edge sets: list, all-single-arrows, all-into:<node>; '|' separates sets");
  sd->add_option("--measure", o.measures,
                 "causal-strength|observed-influence|cmi|te|info-flow-ap|info-flow-se|ace (comma list)")
      ->delimiter(',');
  sd->add_option("--do", o.do_spec, "Intervened nodes C for info-flow-ap (comma list)");
  add_common(sd, o);

  auto* sl = app.add_subcommand("strength-linear", "Closed-form measures on a linear-Gaussian model");
  sl->add_option("--model", o.model, "Linear SEM JSON")->required()->check(CLI::ExistingFile);
  sl->add_option("--edges", o.edges, "Edge sets (as for strength-discrete)");
  sl->add_option("--measure", o.measures, "causal-strength|cmi (comma list)")->delimiter(',');
  add_common(sl, o);

  auto* es = app.add_subcommand("estimate", "Estimate strengths from samples and a DAG");
  es->add_option("--model", o.model, "DAG or linear SEM JSON")->required()->check(CLI::ExistingFile);
  es->add_option("--data", o.data, "Samples CSV (header of variable names)")->required()->check(CLI::ExistingFile);
  es->add_option("--edges", o.edges, "Edge sets (as for strength-discrete)");
  es->add_option("--measure", o.measures, "causal-strength")->delimiter(',');
  es->add_option("--seeds", o.seeds, "Number of consecutive split seeds");
  es->add_flag("--clamp", o.clamp, "Report negative estimates as 0");
  add_estimation(es, o);
  add_common(es, o);

  auto* sim = app.add_subcommand("simulate-linear", "Draw samples from a linear SEM");
  sim->add_option("--model", o.model, "Linear SEM JSON")->required()->check(CLI::ExistingFile);
  sim->add_option("--count", o.count, "Number of samples")->check(CLI::PositiveNumber);
  sim->add_option("--seed", o.seed, "Random seed");
  sim->add_option("--out", o.out, "Write CSV to this file instead of stdout");

  auto* ts = app.add_subcommand("timeseries", "Simulate and/or estimate VAR strength and transfer entropy");
  ts->add_option("--model", o.model, "VAR model JSON")->check(CLI::ExistingFile);
  ts->add_option("--data", o.data, "Trajectory CSV (columns t, components)")->check(CLI::ExistingFile);
  ts->add_option("--target", o.target, "Target component");
  ts->add_option("--length", o.length, "Simulated length")->check(CLI::PositiveNumber);
  ts->add_option("--lag", o.lag, "Window lag p (default: model order)");
  ts->add_option("--stride", o.stride, "Window stride (default 10 p)");
  ts->add_option("--burn-in", o.burn_in, "Discarded initial steps");
  ts->add_option("--seeds", o.seeds, "Number of simulated trajectories");
  ts->add_option("--trajectory-out", o.trajectory_out, "Write the first trajectory as CSV");
  add_estimation(ts, o);
  add_common(ts, o);

  auto* rp = app.add_subcommand("repro", "Regenerate experiment data as CSV");
  rp->add_option("target", o.repro_target, "fig6|fig7|fig9|example7|xor|code|broadcast")
      ->required()
      ->check(CLI::IsMember(repro_targets()));
  rp->add_option("--seeds", o.seeds, "Seeds per configuration");
  rp->add_option("--count", o.count, "Sample size for fig7");
  rp->add_option("--stride", o.stride, "Window stride for fig9 (default 10)");
  rp->add_option("--burn-in", o.burn_in, "Discarded initial steps for fig9");
  add_estimation(rp, o);
  add_common(rp, o);

  std::vector<std::string> argv(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(argv.begin(), argv.end());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    if (e.get_exit_code() == 0) return 0;
    return 2;
  }

  try {
    std::ostringstream buffer;
    int status = 0;
    if (sim->parsed()) {
      status = cmd_simulate_linear(o, buffer);
    } else {
      for (const auto& m : o.measures) {
        static const std::vector<std::string> known{"causal-strength", "observed-influence", "cmi", "te",
                                                    "info-flow-ap", "info-flow-se", "ace"};
        if (std::find(known.begin(), known.end(), m) == known.end()) {
          throw UsageError("unknown measure '" + m + "'");
        }
      }
      if (es->parsed() && !o.measures.empty() && measures_or_default(o) != std::vector<std::string>{"causal-strength"}) {
        throw UsageError("estimate supports only --measure causal-strength");
      }
      Table t;
      if (sd->parsed()) t = cmd_strength_discrete(o);
      else if (sl->parsed()) t = cmd_strength_linear(o);
      else if (es->parsed()) t = cmd_estimate(o);
      else if (ts->parsed()) t = cmd_timeseries(o);
      else t = repro_table().at(o.repro_target)(o);
      write_table(buffer, t);
      status = t.failed ? 1 : 0;
      for (const auto& r : t.rows)
        if (!r.back().empty()) err << "row failed: " << r.back() << '\n';
    }
    if (o.out.empty()) {
      out << buffer.str();
    } else {
      std::ofstream f(o.out, std::ios::binary);
      if (!f) throw UsageError("cannot write " + o.out);
      f << buffer.str();
    }
    return status;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace causal::cli

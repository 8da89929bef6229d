#include "causal/timeseries.hpp"

#include <cmath>
#include <random>

#include <unsupported/Eigen/KroneckerProduct>

#include "causal/error.hpp"

namespace causal {

namespace {

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

constexpr double kDegenerate = 1e-14;

}  // namespace

std::size_t VarModel::index_of(std::string_view component) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == component) return i;
  }
  throw UsageError("unknown component '" + std::string(component) + "'");
}

Eigen::MatrixXd VarModel::companion() const {
  const auto d = static_cast<long>(dimension());
  const auto p = static_cast<long>(order());
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(d * p, d * p);
  for (long i = 0; i < p; ++i) f.block(0, i * d, d, d) = lags[static_cast<std::size_t>(i)];
  if (p > 1) f.block(d, 0, d * (p - 1), d * (p - 1)).setIdentity();
  return f;
}

void VarModel::validate() const {
  const auto d = static_cast<long>(dimension());
  if (d == 0) throw UsageError("VAR model has no components");
  if (lags.empty()) throw UsageError("VAR model needs at least one lag matrix");
  for (const auto& b : lags) {
    if (b.rows() != d || b.cols() != d) throw UsageError("VAR lag matrix has the wrong shape");
    if (!b.allFinite()) throw UsageError("VAR coefficients must be finite");
  }
  if (noise_vars.size() != d) throw UsageError("VAR model needs one noise variance per component");
  if (!(noise_vars.array() >= 0.0).all() || !noise_vars.allFinite()) {
    throw UsageError("VAR noise variances must be finite and nonnegative");
  }
  Eigen::EigenSolver<Eigen::MatrixXd> eig(companion(), false);
  const double radius = eig.eigenvalues().cwiseAbs().maxCoeff();
  if (!(radius < 1.0 - 1e-12)) {
    throw UsageError("VAR model is not stationary (spectral radius " + std::to_string(radius) + ")");
  }
}

VarModel coupled_ar1(double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw UsageError("eps must lie in [0,1]");
  const double c = std::sqrt(1.0 - eps * eps);
  Eigen::MatrixXd b(2, 2);
  b << 0.0, c, c, 0.0;
  return {{"X", "Y"}, {b}, Eigen::Vector2d(eps * eps, eps * eps)};
}

Trajectory simulate_var(const VarModel& model, std::size_t length, std::uint64_t seed, std::size_t burn_in) {
  model.validate();
  const auto d = static_cast<long>(model.dimension());
  const auto p = static_cast<long>(model.order());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Eigen::VectorXd sd = model.noise_vars.cwiseSqrt();
  const long total = static_cast<long>(burn_in + length);
  // Rolling history, newest first.
  std::vector<Eigen::VectorXd> history(static_cast<std::size_t>(p), Eigen::VectorXd::Zero(d));
  Trajectory out{model.names, Eigen::MatrixXd(d, static_cast<long>(length))};
  for (long t = 0; t < total; ++t) {
    Eigen::VectorXd z(d);
    for (long c = 0; c < d; ++c) z(c) = sd(c) * normal(rng);
    for (long i = 0; i < p; ++i) z += model.lags[static_cast<std::size_t>(i)] * history[static_cast<std::size_t>(i)];
    for (long i = p - 1; i > 0; --i) history[static_cast<std::size_t>(i)] = history[static_cast<std::size_t>(i - 1)];
    history[0] = z;
    if (t >= static_cast<long>(burn_in)) out.data.col(t - static_cast<long>(burn_in)) = z;
  }
  return out;
}

Eigen::MatrixXd stationary_covariance(const VarModel& model) {
  model.validate();
  const Eigen::MatrixXd f = model.companion();
  const long n = f.rows();
  const auto d = static_cast<long>(model.dimension());
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
  q.topLeftCorner(d, d) = model.noise_vars.asDiagonal();
  const Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(n * n, n * n) - Eigen::kroneckerProduct(f, f).eval();
  const Eigen::VectorXd vec_q = Eigen::Map<const Eigen::VectorXd>(q.data(), n * n);
  const Eigen::VectorXd vec_g = lhs.partialPivLu().solve(vec_q);
  Eigen::MatrixXd gamma = Eigen::Map<const Eigen::MatrixXd>(vec_g.data(), n, n);
  return 0.5 * (gamma + gamma.transpose());
}

std::string lagged_name(std::string_view component, std::size_t lag) {
  return std::string(component) + (lag == 0 ? "[t]" : "[t-" + std::to_string(lag) + "]");
}

WindowGraph window_graph(const std::vector<std::string>& names, std::size_t p, std::string_view target) {
  if (p == 0) throw UsageError("lag order must be at least 1");
  bool found = false;
  for (const auto& n : names) found = found || n == target;
  if (!found) throw UsageError("unknown component '" + std::string(target) + "'");
  std::vector<std::string> nodes;
  for (std::size_t lag = p; lag >= 1; --lag) {
    for (const auto& c : names) nodes.push_back(lagged_name(c, lag));
  }
  const std::string y = lagged_name(target, 0);
  std::vector<Edge> edges;
  EdgeSet cut;
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    for (std::size_t i = 0; i < j; ++i) edges.push_back({nodes[i], nodes[j]});
  }
  for (std::size_t lag = p; lag >= 1; --lag) {
    for (const auto& c : names) {
      edges.push_back({lagged_name(c, lag), y});
      if (c != target) cut.insert({lagged_name(c, lag), y});
    }
  }
  nodes.push_back(y);
  return {Dag(nodes, edges), cut};
}

WindowModel window_model(const VarModel& model, std::string_view target) {
  const Eigen::MatrixXd gamma = stationary_covariance(model);
  const auto d = static_cast<long>(model.dimension());
  const auto p = static_cast<long>(model.order());
  const long n = d * p;
  const std::size_t ti = model.index_of(target);
  WindowGraph graph = window_graph(model.names, model.order(), target);

  // Window order is oldest lag first; the stacked state is newest first.
  auto state_index = [&](long window_pos) {
    const long lag_block = window_pos / d;  // 0 = lag p
    const long comp = window_pos % d;
    return (p - 1 - lag_block) * d + comp;
  };
  Eigen::MatrixXd cov(n, n);
  for (long a = 0; a < n; ++a)
    for (long b = 0; b < n; ++b) cov(a, b) = gamma(state_index(a), state_index(b));

  // Unit lower-triangular LDL' of the lagged block gives its recursive
  // regressions; zero pivots mark variables determined by earlier ones.
  Eigen::MatrixXd l = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd dvec = Eigen::VectorXd::Zero(n);
  const double scale = std::max(cov.diagonal().maxCoeff(), 1.0);
  for (long k = 0; k < n; ++k) {
    double v = cov(k, k);
    for (long j = 0; j < k; ++j) v -= l(k, j) * l(k, j) * dvec(j);
    dvec(k) = v > kDegenerate * scale ? v : 0.0;
    for (long i = k + 1; i < n; ++i) {
      if (dvec(k) == 0.0) break;
      double s = cov(i, k);
      for (long j = 0; j < k; ++j) s -= l(i, j) * l(k, j) * dvec(j);
      l(i, k) = s / dvec(k);
    }
  }
  const Eigen::MatrixXd regress =
      Eigen::MatrixXd::Identity(n, n) -
      l.triangularView<Eigen::UnitLower>().solve(Eigen::MatrixXd::Identity(n, n));

  const auto& nodes = graph.dag.nodes();
  std::map<Edge, double> coef;
  std::map<std::string, double> noise;
  for (long j = 0; j < n; ++j) {
    noise[nodes[static_cast<std::size_t>(j)]] = dvec(j);
    for (long i = 0; i < j; ++i) coef[{nodes[static_cast<std::size_t>(i)], nodes[static_cast<std::size_t>(j)]}] = regress(j, i);
  }
  const std::string& y = nodes.back();
  noise[y] = model.noise_vars(static_cast<long>(ti));
  for (long a = 0; a < n; ++a) {
    const long lag = p - a / d;
    const long comp = a % d;
    coef[{nodes[static_cast<std::size_t>(a)], y}] = model.lags[static_cast<std::size_t>(lag - 1)](static_cast<long>(ti), comp);
  }
  return {LinearSem(graph.dag, coef, noise), graph.cut};
}

double exact_strength_var(const VarModel& model, std::string_view target, LogBase base) {
  const WindowModel w = window_model(model, target);
  const std::string y = lagged_name(target, 0);
  if (w.sem.noise_variance(y) <= 0.0) {
    const double signal = causal_strength_linear_local(w.sem, w.cut, LogBase::nats);
    return signal == 0.0 ? 0.0 : kInfinity;
  }
  const double global = causal_strength_linear(w.sem, w.cut, base);
  // A degenerate lagged block makes the full covariance singular even though
  // the target's conditional laws are regular; use the per-target form then.
  return std::isinf(global) ? causal_strength_linear_local(w.sem, w.cut, base) : global;
}

double transfer_entropy_var(const VarModel& model, std::string_view target, LogBase base) {
  const Eigen::MatrixXd f = model.companion();
  const long n = f.rows();
  const auto d = static_cast<long>(model.dimension());
  const auto ti = static_cast<long>(model.index_of(target));
  const double innovation = model.noise_vars(ti);
  if (innovation <= 0.0) throw NumericError("transfer entropy undefined: target innovation variance is 0");
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
  q.topLeftCorner(d, d) = model.noise_vars.asDiagonal();

  // Prediction-error covariance of the state given the target's own past,
  // iterated to its fixed point from the unconditional covariance.
  Eigen::MatrixXd pred = stationary_covariance(model);
  double previous = pred(ti, ti);
  for (int it = 0; it < 100000; ++it) {
    const double s = pred(ti, ti);
    Eigen::MatrixXd filtered = pred;
    if (s > 0.0) filtered -= pred.col(ti) * pred.row(ti) / s;
    pred = f * filtered * f.transpose() + q;
    pred = 0.5 * (pred + pred.transpose()).eval();
    const double now = pred(ti, ti);
    if (std::abs(now - previous) <= 1e-15 * std::max(1.0, now) && it > 2) break;
    previous = now;
  }
  return from_nats(0.5 * std::log(pred(ti, ti) / innovation), base);
}

PerturbedCopyValues exact_perturbed_copy(double eps, LogBase base) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw UsageError("eps must lie in [0,1]");
  const double two = 2.0 * eps * (1.0 - eps);
  const double te = -xlogx(1.0 - two) - xlogx(two) + xlogx(eps) + xlogx(1.0 - eps);
  const double cs = std::log(2.0) + xlogx(1.0 - eps) + xlogx(eps);
  return {from_nats(std::max(te, 0.0), base), from_nats(std::max(cs, 0.0), base)};
}

SampleMatrix embed_windows(const Trajectory& traj, std::size_t p, std::string_view target, std::size_t stride) {
  if (stride == 0) throw UsageError("window stride must be positive");
  const WindowGraph g = window_graph(traj.names, p, target);
  std::vector<long> starts;
  for (std::size_t t = p; t < traj.length(); t += stride) starts.push_back(static_cast<long>(t));
  if (starts.size() < 2) throw UsageError("trajectory too short for the requested windows");
  const auto d = static_cast<long>(traj.names.size());
  long ti = 0;
  for (long c = 0; c < d; ++c) {
    if (traj.names[static_cast<std::size_t>(c)] == target) ti = c;
  }
  SampleMatrix out{g.dag.nodes(), Eigen::MatrixXd(static_cast<long>(g.dag.size()), static_cast<long>(starts.size()))};
  for (std::size_t w = 0; w < starts.size(); ++w) {
    const long t = starts[w];
    long row = 0;
    for (long lag = static_cast<long>(p); lag >= 1; --lag) {
      for (long c = 0; c < d; ++c) out.data(row++, static_cast<long>(w)) = traj.data(c, t - lag);
    }
    out.data(row, static_cast<long>(w)) = traj.data(ti, t);
  }
  return out;
}

double estimate_strength_ts(const Trajectory& traj, std::size_t p, std::string_view target,
                            const EstimationConfig& cfg, std::size_t stride) {
  if (stride == 0) stride = 10 * p;
  const WindowGraph g = window_graph(traj.names, p, target);
  return estimate_causal_strength(embed_windows(traj, p, target, stride), g.dag, g.cut, cfg);
}

}  // namespace causal

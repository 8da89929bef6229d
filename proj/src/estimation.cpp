#include "causal/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "causal/error.hpp"
#include "causal/kdtree.hpp"

namespace causal {

namespace {

constexpr double kJitterScale = 1e-9;
constexpr std::uint64_t kJitterSeed = 0x6a09e667f3bcc909ULL;

std::vector<std::size_t> random_permutation(std::size_t n, std::mt19937_64& rng) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

// r-th neighbour distances of every column of `p` within p (self excluded)
// and within q.
void neighbour_distances(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q, std::size_t r,
                         Eigen::VectorXd& within, Eigen::VectorXd& across) {
  const KdTree tp(p);
  const KdTree tq(q);
  within.resize(p.cols());
  across.resize(p.cols());
  for (long i = 0; i < p.cols(); ++i) {
    const Eigen::VectorXd x = p.col(i);
    within(i) = tp.rth_distance(x.data(), r, i);
    across(i) = tq.rth_distance(x.data(), r);
  }
}

}  // namespace

std::size_t SampleMatrix::row(std::string_view variable) const {
  auto it = std::find(variables.begin(), variables.end(), variable);
  if (it == variables.end()) throw UsageError("variable '" + std::string(variable) + "' not in data");
  return static_cast<std::size_t>(it - variables.begin());
}

SampleMatrix SampleMatrix::rows(const std::vector<std::string>& keep) const {
  SampleMatrix out{keep, Eigen::MatrixXd(static_cast<long>(keep.size()), data.cols())};
  for (std::size_t k = 0; k < keep.size(); ++k) out.data.row(static_cast<long>(k)) = data.row(static_cast<long>(row(keep[k])));
  return out;
}

SampleMatrix SampleMatrix::columns(const std::vector<std::size_t>& idx) const {
  SampleMatrix out{variables, Eigen::MatrixXd(data.rows(), static_cast<long>(idx.size()))};
  for (std::size_t c = 0; c < idx.size(); ++c) out.data.col(static_cast<long>(c)) = data.col(static_cast<long>(idx[c]));
  return out;
}

void SampleMatrix::validate() const {
  if (static_cast<std::size_t>(data.rows()) != variables.size()) {
    throw UsageError("sample matrix has " + std::to_string(data.rows()) + " rows for " +
                     std::to_string(variables.size()) + " variables");
  }
  std::set<std::string> unique(variables.begin(), variables.end());
  if (unique.size() != variables.size()) throw UsageError("duplicate variable in sample matrix");
  if (!data.allFinite()) throw UsageError("sample matrix contains non-finite entries");
  if (data.cols() < 2) throw UsageError("at least two observations are required");
}

SampleMatrix simulate_linear(const LinearSem& sem, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto n = static_cast<long>(sem.size());
  const Eigen::MatrixXd& m = sem.structure();
  const Eigen::VectorXd sd = sem.noise().cwiseSqrt();
  SampleMatrix out{sem.order(), Eigen::MatrixXd(n, static_cast<long>(count))};
  for (long c = 0; c < static_cast<long>(count); ++c) {
    for (long j = 0; j < n; ++j) {
      double v = sd(j) * normal(rng);
      for (long i = 0; i < j; ++i) v += m(j, i) * out.data(i, c);
      out.data(j, c) = v;
    }
  }
  return out;
}

LinearSem ridge_fit(const SampleMatrix& data, const Dag& dag, double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw UsageError("ridge lambda must be finite and >= 0");
  std::map<Edge, double> coefficients;
  std::map<std::string, double> noise;
  const long count = data.data.cols();
  for (const auto& node : dag.nodes()) {
    const auto parents = dag.parents(node);
    const Eigen::VectorXd y = data.data.row(static_cast<long>(data.row(node))).transpose();
    Eigen::VectorXd resid = y;
    if (!parents.empty()) {
      if (count <= static_cast<long>(parents.size())) {
        throw UsageError("too few observations to fit node '" + node + "'");
      }
      Eigen::MatrixXd x(count, static_cast<long>(parents.size()));
      for (std::size_t k = 0; k < parents.size(); ++k) {
        x.col(static_cast<long>(k)) = data.data.row(static_cast<long>(data.row(parents[k]))).transpose();
      }
      Eigen::MatrixXd gram = x.transpose() * x;
      gram.diagonal().array() += lambda;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
      const double lo = eig.eigenvalues().minCoeff();
      const double hi = eig.eigenvalues().maxCoeff();
      if (!(hi > 0.0) || lo <= 1e-12 * hi) {
        throw NumericError("singular normal equations for node '" + node + "'");
      }
      const Eigen::VectorXd beta = gram.ldlt().solve(x.transpose() * y);
      for (std::size_t k = 0; k < parents.size(); ++k) coefficients[{parents[k], node}] = beta(static_cast<long>(k));
      resid = y - x * beta;
    }
    const double mean = resid.mean();
    noise[node] = (resid.array() - mean).square().sum() / static_cast<double>(count - 1);
  }
  return LinearSem(dag, coefficients, noise);
}

SampleMatrix residuals(const SampleMatrix& data, const LinearSem& sem) {
  const SampleMatrix x = data.rows(sem.order());
  SampleMatrix out = x;
  out.data = x.data - sem.structure() * x.data;
  return out;
}

SampleMatrix virtual_samples(const SampleMatrix& data, const LinearSem& sem, const EdgeSet& s,
                             std::uint64_t seed) {
  validate_edges(sem.dag(), s);
  const SampleMatrix x = data.rows(sem.order());
  if (s.empty()) return x;
  const long n = static_cast<long>(sem.size());
  const long count = x.data.cols();
  const Eigen::MatrixXd& m = sem.structure();

  std::mt19937_64 rng(seed);
  std::map<Edge, std::vector<std::size_t>> perms;
  for (const auto& e : s) perms[e] = random_permutation(static_cast<std::size_t>(count), rng);

  SampleMatrix out = x;
  std::vector<bool> changed(static_cast<std::size_t>(n), false);
  const auto& order = sem.order();
  for (long j = 0; j < n; ++j) {
    const auto parents = sem.dag().parents(order[static_cast<std::size_t>(j)]);
    bool affected = false;
    for (const auto& p : parents) {
      affected = affected || s.contains(p, order[static_cast<std::size_t>(j)]) ||
                 changed[sem.position(p)];
    }
    if (!affected) continue;
    changed[static_cast<std::size_t>(j)] = true;
    // Observed residual of the original equation, then the modified equation.
    Eigen::RowVectorXd value = x.data.row(j);
    for (const auto& p : parents) value -= m(j, static_cast<long>(sem.position(p))) * x.data.row(static_cast<long>(sem.position(p)));
    for (const auto& p : parents) {
      const long i = static_cast<long>(sem.position(p));
      auto it = perms.find({p, order[static_cast<std::size_t>(j)]});
      if (it == perms.end()) {
        value += m(j, i) * out.data.row(i);
      } else {
        for (long c = 0; c < count; ++c) value(c) += m(j, i) * x.data(i, static_cast<long>(it->second[static_cast<std::size_t>(c)]));
      }
    }
    out.data.row(j) = value;
  }
  return out;
}

double knn_kl_estimate(const SampleMatrix& p, const SampleMatrix& q, std::size_t r, LogBase base) {
  if (p.variables != q.variables) throw UsageError("knn estimate: sample sets have different variables");
  const auto dims = static_cast<long>(p.dimension());
  const auto k = static_cast<long>(p.count());
  const auto m = static_cast<long>(q.count());
  if (dims == 0) return 0.0;
  if (r < 1) throw UsageError("neighbour rank must be at least 1");
  if (static_cast<long>(r) >= k || static_cast<long>(r) > m) {
    throw UsageError("neighbour rank " + std::to_string(r) + " too large for " + std::to_string(k) +
                     " and " + std::to_string(m) + " samples");
  }
  Eigen::MatrixXd a = p.data;
  Eigen::MatrixXd b = q.data;
  Eigen::VectorXd within;
  Eigen::VectorXd across;
  neighbour_distances(a, b, r, within, across);

  // Duplicate points: jitter both sets by a tiny multiple of each
  // dimension's spread and recompute.
  std::mt19937_64 rng(kJitterSeed);
  for (int attempt = 0; attempt < 8 && (within.minCoeff() <= 0.0 || across.minCoeff() <= 0.0); ++attempt) {
    Eigen::MatrixXd both(dims, k + m);
    both << a, b;
    for (long d = 0; d < dims; ++d) {
      const double mean = both.row(d).mean();
      const double sd = std::sqrt((both.row(d).array() - mean).square().sum() / static_cast<double>(k + m - 1));
      const double scale = kJitterScale * (sd > 0.0 ? sd : 1.0) * std::pow(10.0, attempt);
      std::uniform_real_distribution<double> u(-scale, scale);
      for (long c = 0; c < k; ++c) a(d, c) += u(rng);
      for (long c = 0; c < m; ++c) b(d, c) += u(rng);
    }
    neighbour_distances(a, b, r, within, across);
  }
  if (within.minCoeff() <= 0.0 || across.minCoeff() <= 0.0) {
    throw NumericError("knn estimate: zero neighbour distance persists after jitter");
  }
  const double sum = (across.array() / within.array()).log().sum();
  const double d = static_cast<double>(dims) / static_cast<double>(k) * sum +
                   std::log(static_cast<double>(m) / static_cast<double>(k - 1));
  return from_nats(d, base);
}

double estimate_causal_strength(const SampleMatrix& data, const Dag& dag, const EdgeSet& s,
                                const EstimationConfig& cfg) {
  validate_edges(dag, s);
  data.validate();
  if (!(cfg.split_fraction > 0.0 && cfg.split_fraction < 1.0)) {
    throw UsageError("split fraction must lie strictly between 0 and 1");
  }
  SampleMatrix x = data.rows(dag.topological_order());
  const Eigen::VectorXd mean = x.data.rowwise().mean();
  x.data.colwise() -= mean;

  const std::size_t count = x.count();
  const auto size_a = static_cast<std::size_t>(std::llround(cfg.split_fraction * static_cast<double>(count)));
  if (size_a <= cfg.knn_r || count - size_a < cfg.knn_r) {
    throw UsageError("not enough observations for the split and neighbour rank");
  }
  std::mt19937_64 rng(cfg.seed);
  const auto perm = random_permutation(count, rng);
  std::vector<std::size_t> idx_a(perm.begin(), perm.begin() + static_cast<long>(size_a));
  std::vector<std::size_t> idx_b(perm.begin() + static_cast<long>(size_a), perm.end());
  std::sort(idx_a.begin(), idx_a.end());
  std::sort(idx_b.begin(), idx_b.end());
  const SampleMatrix part_a = x.columns(idx_a);
  const SampleMatrix part_b = x.columns(idx_b);

  if (s.empty()) return from_nats(knn_kl_estimate(part_a, part_b, cfg.knn_r), cfg.base);

  const double lambda = cfg.ridge_lambda.value_or(1e-3 * static_cast<double>(count));
  const LinearSem sem = ridge_fit(x, dag, lambda);

  double total = 0.0;
  for (const auto& [target, part] : group_by_target(s)) {
    std::vector<std::string> family;
    const auto parents = dag.parents(target);
    for (const auto& v : dag.topological_order()) {
      if (v == target || std::find(parents.begin(), parents.end(), v) != parents.end()) family.push_back(v);
    }
    const SampleMatrix virt = virtual_samples(part_b, sem, part, rng());
    total += knn_kl_estimate(part_a.rows(family), virt.rows(family), cfg.knn_r);
  }
  return from_nats(total, cfg.base);
}

}  // namespace causal

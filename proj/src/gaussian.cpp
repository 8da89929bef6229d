#include "causal/gaussian.hpp"

#include <algorithm>
#include <cmath>

#include "causal/error.hpp"

namespace causal {

namespace {

constexpr double kSymmetryTolerance = 1e-10;
constexpr double kDefiniteness = 1e-12;

Eigen::MatrixXd solve_structure(const Eigen::MatrixXd& m, const Eigen::VectorXd& noise) {
  const auto n = m.rows();
  const Eigen::MatrixXd i_minus_m = Eigen::MatrixXd::Identity(n, n) - m;
  const Eigen::MatrixXd inv =
      i_minus_m.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(n, n));
  Eigen::MatrixXd sigma = inv * noise.asDiagonal() * inv.transpose();
  return 0.5 * (sigma + sigma.transpose());
}

// Smallest and largest eigenvalue of a symmetric matrix.
std::pair<double, double> spectrum_bounds(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a, Eigen::EigenvaluesOnly);
  return {eig.eigenvalues().minCoeff(), eig.eigenvalues().maxCoeff()};
}

bool positive_definite(const Eigen::MatrixXd& a) {
  if (a.size() == 0) return true;
  const auto [lo, hi] = spectrum_bounds(a);
  return hi > 0.0 && lo > kDefiniteness * hi;
}

}  // namespace

LinearSem::LinearSem(Dag dag, const std::map<Edge, double>& coefficients,
                     const std::map<std::string, double>& noise_variances)
    : dag_(std::move(dag)) {
  const auto n = static_cast<Eigen::Index>(dag_.size());
  m_ = Eigen::MatrixXd::Zero(n, n);
  noise_ = Eigen::VectorXd::Zero(n);
  for (const auto& [edge, value] : coefficients) {
    if (!dag_.has_edge(edge.source, edge.target)) {
      throw InvalidEdgeError("coefficient given for " + to_string(edge) + ", which is not an edge");
    }
    if (!std::isfinite(value)) throw UsageError("non-finite coefficient on " + to_string(edge));
    m_(static_cast<Eigen::Index>(position(edge.target)), static_cast<Eigen::Index>(position(edge.source))) =
        value;
  }
  for (const auto& node : dag_.nodes()) {
    auto it = noise_variances.find(node);
    if (it == noise_variances.end()) throw UsageError("no noise variance for node '" + node + "'");
    if (!(it->second >= 0.0) || !std::isfinite(it->second)) {
      throw UsageError("noise variance of '" + node + "' must be finite and nonnegative");
    }
    noise_(static_cast<Eigen::Index>(position(node))) = it->second;
  }
  for (const auto& [name, v] : noise_variances) {
    if (!dag_.contains(name)) throw UsageError("noise variance given for unknown node '" + name + "'");
  }
}

std::size_t LinearSem::position(std::string_view node) const {
  return dag_.topological_position(dag_.index_of(node));
}

double LinearSem::coefficient(std::string_view source, std::string_view target) const {
  return m_(static_cast<Eigen::Index>(position(target)), static_cast<Eigen::Index>(position(source)));
}

double LinearSem::noise_variance(std::string_view node) const {
  return noise_(static_cast<Eigen::Index>(position(node)));
}

std::map<Edge, double> LinearSem::coefficients() const {
  std::map<Edge, double> out;
  for (const auto& e : dag_.edges()) out[e] = coefficient(e.source, e.target);
  return out;
}

void Covariance::validate() const {
  if (matrix.rows() != matrix.cols() || static_cast<std::size_t>(matrix.rows()) != variables.size()) {
    throw NumericError("covariance shape does not match its variables");
  }
  if ((matrix - matrix.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance) {
    throw NumericError("covariance is not symmetric");
  }
  if (matrix.size() > 0 && spectrum_bounds(matrix).first < -kSymmetryTolerance) {
    throw NumericError("covariance has a negative eigenvalue");
  }
}

Covariance Covariance::restricted(const std::vector<std::string>& keep) const {
  std::vector<Eigen::Index> idx;
  for (const auto& k : keep) {
    auto it = std::find(variables.begin(), variables.end(), k);
    if (it == variables.end()) throw UsageError("variable '" + k + "' not in covariance");
    idx.push_back(it - variables.begin());
  }
  Covariance out{keep, Eigen::MatrixXd(idx.size(), idx.size())};
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = 0; b < idx.size(); ++b) out.matrix(a, b) = matrix(idx[a], idx[b]);
  return out;
}

Covariance observational_covariance(const LinearSem& sem) {
  return {sem.order(), solve_structure(sem.structure(), sem.noise())};
}

Covariance cut_covariance(const LinearSem& sem, const EdgeSet& s) {
  validate_edges(sem.dag(), s);
  if (s.empty()) return observational_covariance(sem);
  const Eigen::VectorXd var = observational_covariance(sem).matrix.diagonal();
  Eigen::MatrixXd kept = sem.structure();
  Eigen::VectorXd noise = sem.noise();
  for (const auto& e : s) {
    const auto j = static_cast<Eigen::Index>(sem.position(e.target));
    const auto i = static_cast<Eigen::Index>(sem.position(e.source));
    noise(j) += kept(j, i) * kept(j, i) * var(i);
    kept(j, i) = 0.0;
  }
  return {sem.order(), solve_structure(kept, noise)};
}

double gaussian_kl(const Covariance& p, const Covariance& q, LogBase base) {
  if (p.variables != q.variables || p.matrix.rows() != q.matrix.rows()) {
    throw UsageError("gaussian_kl: covariances are over different variables");
  }
  const auto n = p.matrix.rows();
  if (n == 0) return 0.0;
  if (!positive_definite(p.matrix)) throw NumericError("gaussian_kl: first covariance is singular");
  if (!positive_definite(q.matrix)) return kInfinity;
  const Eigen::LLT<Eigen::MatrixXd> lp(p.matrix);
  const Eigen::LLT<Eigen::MatrixXd> lq(q.matrix);
  if (lp.info() != Eigen::Success) throw NumericError("gaussian_kl: first covariance is singular");
  if (lq.info() != Eigen::Success) return kInfinity;
  const double trace = lq.solve(p.matrix).trace();
  const double logdet_p = 2.0 * lp.matrixL().toDenseMatrix().diagonal().array().log().sum();
  const double logdet_q = 2.0 * lq.matrixL().toDenseMatrix().diagonal().array().log().sum();
  const double d = 0.5 * (trace - (logdet_p - logdet_q) - static_cast<double>(n));
  return from_nats(std::max(d, 0.0), base);
}

double causal_strength_linear(const LinearSem& sem, const EdgeSet& s, LogBase base) {
  validate_edges(sem.dag(), s);
  if (s.empty()) return 0.0;
  const Covariance sigma = observational_covariance(sem);
  if (!positive_definite(sigma.matrix)) return kInfinity;
  return gaussian_kl(sigma, cut_covariance(sem, s), base);
}

double causal_strength_linear_local(const LinearSem& sem, const EdgeSet& s, LogBase base) {
  validate_edges(sem.dag(), s);
  const Covariance sigma = observational_covariance(sem);
  double total = 0.0;
  for (const auto& [target, part] : group_by_target(s)) {
    std::vector<std::string> sources;
    Eigen::VectorXd a(static_cast<Eigen::Index>(part.size()));
    Eigen::Index k = 0;
    double inflated = sem.noise_variance(target);
    for (const auto& e : part) {
      sources.push_back(e.source);
      a(k) = sem.coefficient(e.source, e.target);
      const auto i = static_cast<Eigen::Index>(sem.position(e.source));
      inflated += a(k) * a(k) * sigma.matrix(i, i);
      ++k;
    }
    const double s2 = sem.noise_variance(target);
    const double signal = a.dot(sigma.restricted(sources).matrix * a);
    if (signal == 0.0) continue;
    if (s2 <= 0.0) return kInfinity;
    total += 0.5 * ((s2 + signal) / inflated - 1.0 + std::log(inflated / s2));
  }
  return from_nats(std::max(total, 0.0), base);
}

}  // namespace causal

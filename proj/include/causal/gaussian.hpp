#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "causal/graph.hpp"
#include "causal/units.hpp"

namespace causal {

/// Zero-mean linear structural equation model X = M X + E with independent
/// Gaussian noise.
///
/// Internally variables are laid out in the topological order of the graph
/// and `structure()(j, i)` is the coefficient of X_i in the equation of X_j,
/// so the structure matrix is strictly lower triangular.
class LinearSem {
 public:
  LinearSem() = default;
  /// Coefficients for pairs that are not edges of `dag` are rejected; edges
  /// without an entry get coefficient 0. Every node needs a noise variance.
  LinearSem(Dag dag, const std::map<Edge, double>& coefficients,
            const std::map<std::string, double>& noise_variances);

  const Dag& dag() const { return dag_; }
  const std::vector<std::string>& order() const { return dag_.topological_order(); }
  std::size_t size() const { return dag_.size(); }

  double coefficient(std::string_view source, std::string_view target) const;
  double noise_variance(std::string_view node) const;
  std::map<Edge, double> coefficients() const;

  const Eigen::MatrixXd& structure() const { return m_; }
  const Eigen::VectorXd& noise() const { return noise_; }
  /// Topological position of `node` (its row in structure()).
  std::size_t position(std::string_view node) const;

 private:
  Dag dag_;
  Eigen::MatrixXd m_;
  Eigen::VectorXd noise_;
};

/// Covariance matrix with named axes.
struct Covariance {
  std::vector<std::string> variables;
  Eigen::MatrixXd matrix;

  /// Throws NumericError unless symmetric within 1e-10 with eigenvalues
  /// >= -1e-10.
  void validate() const;
  /// Reorders/restricts to `keep`.
  Covariance restricted(const std::vector<std::string>& keep) const;
};

/// Sigma = (I - M)^{-1} Sigma_E (I - M)^{-T}, variables in topological order.
Covariance observational_covariance(const LinearSem& sem);

/// Covariance of the model with the arrows in `s` cut. Each cut arrow is fed
/// by its own independent copy of its source, so its contribution
/// a^2 Var(source) is added to the noise variance of the target, and the
/// remaining structure is solved as before.
Covariance cut_covariance(const LinearSem& sem, const EdgeSet& s);

/// D(N(0, p) || N(0, q)). Returns +inf if q is singular (smallest eigenvalue
/// <= 1e-12 times the largest); throws NumericError if p is singular.
double gaussian_kl(const Covariance& p, const Covariance& q, LogBase base = LogBase::nats);

/// D(P || P_S) for a linear Gaussian model; +inf when the observational
/// covariance is degenerate and s is nonempty.
double causal_strength_linear(const LinearSem& sem, const EdgeSet& s, LogBase base = LogBase::nats);

/// Same quantity summed target by target from the conditional laws:
/// 1/2 [(s2 + a' C a) / s2' - 1 + ln(s2' / s2)] with s2' = s2 + sum a_k^2 Var X_k,
/// where a, C are the cut coefficients and the covariance of their sources.
double causal_strength_linear_local(const LinearSem& sem, const EdgeSet& s,
                                    LogBase base = LogBase::nats);

}  // namespace causal

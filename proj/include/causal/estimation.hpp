#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "causal/gaussian.hpp"
#include "causal/graph.hpp"
#include "causal/units.hpp"

namespace causal {

/// Observations stored one variable per row, one observation per column.
struct SampleMatrix {
  std::vector<std::string> variables;
  Eigen::MatrixXd data;

  std::size_t count() const { return static_cast<std::size_t>(data.cols()); }
  std::size_t dimension() const { return variables.size(); }
  std::size_t row(std::string_view variable) const;
  /// Rows for `keep`, in the order given.
  SampleMatrix rows(const std::vector<std::string>& keep) const;
  SampleMatrix columns(const std::vector<std::size_t>& idx) const;
  /// Throws UsageError on shape mismatch, duplicate names or non-finite
  /// entries.
  void validate() const;
};

struct EstimationConfig {
  std::optional<double> ridge_lambda;  ///< default 1e-3 * count
  std::size_t knn_r = 4;
  double split_fraction = 0.5;  ///< share of columns in part A
  std::uint64_t seed = 0;
  LogBase base = LogBase::nats;
};

/// Draws `count` observations of `sem`.
SampleMatrix simulate_linear(const LinearSem& sem, std::size_t count, std::uint64_t seed);

/// Regresses each node on its parents (no intercept) with penalty
/// lambda * |beta|^2. Noise variances are the unbiased residual variances.
LinearSem ridge_fit(const SampleMatrix& data, const Dag& dag, double lambda);

/// E = X - M X for the variables of `sem`.
SampleMatrix residuals(const SampleMatrix& data, const LinearSem& sem);

/// Samples of the model with the arrows in `s` cut: each cut arrow reads its
/// source through its own uniformly random column permutation, and the
/// modified equations are solved with the observed residuals. Rows of nodes
/// that are neither targets nor their descendants are copied unchanged.
SampleMatrix virtual_samples(const SampleMatrix& data, const LinearSem& sem, const EdgeSet& s,
                             std::uint64_t seed);

/// Nearest-neighbour estimate of D(P || Q) from samples of P and of Q.
/// With k samples of P, m of Q and dimension d:
///   (d / k) sum_i log(nu_i / rho_i) + log(m / (k - 1)),
/// rho_i the r-th neighbour distance within P (self excluded), nu_i within Q.
double knn_kl_estimate(const SampleMatrix& p, const SampleMatrix& q, std::size_t r,
                       LogBase base = LogBase::nats);

/// Centers the data, splits columns into parts A and B, fits the linear model
/// on all columns, builds virtual samples from B and compares them with A on
/// each target's family. Contributions of different targets are summed.
double estimate_causal_strength(const SampleMatrix& data, const Dag& dag, const EdgeSet& s,
                                const EstimationConfig& cfg);

}  // namespace causal

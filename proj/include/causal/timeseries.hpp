#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "causal/estimation.hpp"
#include "causal/gaussian.hpp"
#include "causal/units.hpp"

namespace causal {

/// Vector autoregression Z_t = sum_{i=1..p} B_i Z_{t-i} + E_t with
/// independent Gaussian innovations. B_i(r, c) is the coefficient of
/// component c at lag i in the equation of component r.
struct VarModel {
  std::vector<std::string> names;
  std::vector<Eigen::MatrixXd> lags;
  Eigen::VectorXd noise_vars;

  std::size_t dimension() const { return names.size(); }
  std::size_t order() const { return lags.size(); }
  std::size_t index_of(std::string_view component) const;

  /// Throws UsageError on inconsistent shapes, negative noise or a companion
  /// matrix with spectral radius >= 1 - 1e-12.
  void validate() const;
  Eigen::MatrixXd companion() const;
};

/// The coupled AR(1) pair X_t = c Y_{t-1} + E^X_t, Y_t = c X_{t-1} + E^Y_t
/// with c = sqrt(1 - eps^2) and innovation variance eps^2 (unit stationary
/// variances).
VarModel coupled_ar1(double eps);

/// Component-by-time matrix.
struct Trajectory {
  std::vector<std::string> names;
  Eigen::MatrixXd data;

  std::size_t length() const { return static_cast<std::size_t>(data.cols()); }
};

Trajectory simulate_var(const VarModel& model, std::size_t length, std::uint64_t seed,
                        std::size_t burn_in = 1000);

/// Stationary covariance of the stacked state (Z_t, Z_{t-1}, ..., Z_{t-p+1}).
Eigen::MatrixXd stationary_covariance(const VarModel& model);

/// Linear SEM over the window (Z_{t-p}, ..., Z_{t-1}, target_t): the lagged
/// block carries its stationary joint law, target_t its VAR equation.
struct WindowModel {
  LinearSem sem;
  EdgeSet cut;  ///< arrows from other components' lags into target_t
};
WindowModel window_model(const VarModel& model, std::string_view target);

/// Strength of all arrows from the other components' past into target_t.
/// +inf if the target's innovation variance is 0 and those arrows carry
/// signal.
double exact_strength_var(const VarModel& model, std::string_view target, LogBase base = LogBase::nats);

/// 1/2 log(Var(Y_t | Y past) / Var(Y_t | all past)) from the steady-state
/// prediction error of the target series alone.
double transfer_entropy_var(const VarModel& model, std::string_view target, LogBase base = LogBase::nats);

struct PerturbedCopyValues {
  double transfer_entropy;
  double causal_strength;
};

/// Closed forms for the binary chain in which each component copies the
/// other's previous value correctly with probability 1 - eps.
PerturbedCopyValues exact_perturbed_copy(double eps, LogBase base = LogBase::bits);

/// Window variable name, e.g. "X[t-2]" or "Y[t]".
std::string lagged_name(std::string_view component, std::size_t lag);

/// Samples (Z_{t-p..t-1}, target_t) for t = p, p + stride, ...
SampleMatrix embed_windows(const Trajectory& traj, std::size_t p, std::string_view target,
                           std::size_t stride);

/// Graph of one window: complete over the lagged block, every lagged
/// variable a parent of target_t; `cut` as in WindowModel.
struct WindowGraph {
  Dag dag;
  EdgeSet cut;
};
WindowGraph window_graph(const std::vector<std::string>& names, std::size_t p, std::string_view target);

/// Estimate from a single trajectory; stride 0 selects the default 10 p.
double estimate_strength_ts(const Trajectory& traj, std::size_t p, std::string_view target,
                            const EstimationConfig& cfg, std::size_t stride = 0);

}  // namespace causal

#include <cmath>
#include <numbers>
#include <random>

#include "causal/discrete.hpp"
#include "causal/error.hpp"
#include "causal/reference_models.hpp"
#include "causal/timeseries.hpp"
#include "doctest.h"

using namespace causal;

namespace {

VarModel bivariate(double bxx, double bxy, double byx, double byy, double vx, double vy) {
  VarModel m;
  m.names = {"X", "Y"};
  Eigen::MatrixXd b(2, 2);
  b << bxx, bxy, byx, byy;
  m.lags = {b};
  m.noise_vars = Eigen::Vector2d(vx, vy);
  return m;
}

// Stacked stationary covariance by fixed-point iteration of S <- F S F' + Q.
Eigen::MatrixXd iterate_covariance(const VarModel& m) {
  const Eigen::MatrixXd f = m.companion();
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(f.rows(), f.cols());
  for (long i = 0; i < m.noise_vars.size(); ++i) q(i, i) = m.noise_vars(i);
  Eigen::MatrixXd s = q;
  for (int k = 0; k < 4000; ++k) s = f * s * f.transpose() + q;
  return s;
}

// 1/2 log(Var(Y_t | Y_{t-1..t-L}) / sigma_Y^2) from the autocovariances of a VAR(1).
double te_by_long_regression(const VarModel& m, long lags) {
  const Eigen::MatrixXd g0 = iterate_covariance(m);
  const Eigen::MatrixXd& b = m.lags[0];
  std::vector<double> acov(static_cast<std::size_t>(lags + 1));
  Eigen::MatrixXd gh = g0;
  for (long h = 0; h <= lags; ++h) {
    acov[static_cast<std::size_t>(h)] = gh(1, 1);
    gh = b * gh;
  }
  Eigen::MatrixXd t(lags + 1, lags + 1);
  for (long i = 0; i <= lags; ++i)
    for (long j = 0; j <= lags; ++j) t(i, j) = acov[static_cast<std::size_t>(std::abs(i - j))];
  const Eigen::MatrixXd past = t.bottomRightCorner(lags, lags);
  const Eigen::VectorXd cross = t.block(1, 0, lags, 1);
  const double cond = t(0, 0) - cross.dot(past.ldlt().solve(cross));
  return 0.5 * std::log(cond / m.noise_vars(1));
}

double h2(double p) { return p <= 0 || p >= 1 ? 0.0 : -p * std::log2(p) - (1 - p) * std::log2(1 - p); }

}  // namespace

TEST_CASE("coupled AR(1) construction and validation") {
  const auto m = coupled_ar1(0.25);
  CHECK(m.names == std::vector<std::string>{"X", "Y"});
  CHECK(m.lags[0](0, 1) == doctest::Approx(std::sqrt(1 - 0.0625)));
  CHECK(m.lags[0](0, 0) == 0.0);
  CHECK(m.noise_vars(0) == doctest::Approx(0.0625));
  CHECK_THROWS_AS(bivariate(1.0, 0.0, 0.0, 0.5, 1, 1).validate(), UsageError);
  CHECK_THROWS_AS(bivariate(0.5, 0.0, 0.0, 0.5, -1, 1).validate(), UsageError);
  CHECK_THROWS_AS(coupled_ar1(1.5), UsageError);
  CHECK(m.index_of("Y") == 1);
  CHECK_THROWS_AS(m.index_of("Q"), UsageError);
}

TEST_CASE("stationary covariance") {
  SUBCASE("coupled pair has unit variances and no contemporaneous correlation") {
    const auto g = stationary_covariance(coupled_ar1(0.3));
    CHECK(g(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(g(1, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(g(0, 1)) < 1e-12);
  }
  SUBCASE("two lags match fixed-point iteration") {
    VarModel m;
    m.names = {"A", "B"};
    Eigen::MatrixXd b1(2, 2), b2(2, 2);
    b1 << 0.4, 0.2, -0.3, 0.1;
    b2 << 0.1, 0.0, 0.25, -0.2;
    m.lags = {b1, b2};
    m.noise_vars = Eigen::Vector2d(1.0, 0.5);
    const auto g = stationary_covariance(m);
    CHECK((g - iterate_covariance(m)).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("simulation reproduces the stationary moments") {
  const double eps = 0.5;
  const auto traj = simulate_var(coupled_ar1(eps), 200000, 17);
  CHECK(traj.length() == 200000);
  const Eigen::MatrixXd& z = traj.data;
  const double n = static_cast<double>(z.cols());
  CHECK(std::abs(z.row(0).mean()) < 0.02);
  CHECK(z.row(1).squaredNorm() / n == doctest::Approx(1.0).epsilon(0.02));
  // Cov(X_t, Y_{t-1}) = sqrt(1 - eps^2)
  const double lag1 = z.row(0).tail(z.cols() - 1).dot(z.row(1).head(z.cols() - 1)) / (n - 1);
  CHECK(lag1 == doctest::Approx(std::sqrt(1 - eps * eps)).epsilon(0.02));

  const auto again = simulate_var(coupled_ar1(eps), 1000, 17);
  CHECK(again.data == simulate_var(coupled_ar1(eps), 1000, 17).data);
  CHECK(again.data != simulate_var(coupled_ar1(eps), 1000, 18).data);
}

TEST_CASE("window names, graph and embedding") {
  CHECK(lagged_name("X", 2) == "X[t-2]");
  CHECK(lagged_name("Y", 0) == "Y[t]");
  const auto g = window_graph({"X", "Y"}, 2, "Y");
  CHECK(g.dag.nodes() == std::vector<std::string>{"X[t-2]", "Y[t-2]", "X[t-1]", "Y[t-1]", "Y[t]"});
  CHECK(g.cut == EdgeSet{{"X[t-2]", "Y[t]"}, {"X[t-1]", "Y[t]"}});
  CHECK(g.dag.parents("Y[t]").size() == 4);
  CHECK_THROWS_AS(window_graph({"X", "Y"}, 0, "Y"), UsageError);
  CHECK_THROWS_AS(window_graph({"X", "Y"}, 1, "Q"), UsageError);

  Trajectory traj{{"X", "Y"}, Eigen::MatrixXd(2, 7)};
  for (long t = 0; t < 7; ++t) {
    traj.data(0, t) = static_cast<double>(t);
    traj.data(1, t) = 100.0 + static_cast<double>(t);
  }
  const auto w = embed_windows(traj, 2, "Y", 3);
  CHECK(w.variables == g.dag.nodes());
  REQUIRE(w.count() == 2);  // t = 2, 5
  CHECK(w.data(0, 0) == 0.0);
  CHECK(w.data(1, 0) == 100.0);
  CHECK(w.data(2, 1) == 4.0);
  CHECK(w.data(4, 1) == 105.0);
  CHECK_THROWS_AS(embed_windows(traj, 2, "Y", 0), UsageError);
  CHECK_THROWS_AS(embed_windows(traj, 2, "Y", 10), UsageError);
}

TEST_CASE("exact strength of the coupled pair is m ln 2") {
  for (int m = 1; m <= 6; ++m) {
    const double eps = std::ldexp(1.0, -m);
    CHECK(exact_strength_var(coupled_ar1(eps), "Y") == doctest::Approx(m * std::numbers::ln2).epsilon(1e-10));
    CHECK(exact_strength_var(coupled_ar1(eps), "Y", LogBase::bits) == doctest::Approx(m).epsilon(1e-10));
  }
  CHECK(exact_strength_var(bivariate(0.5, 0.0, 0.0, 0.3, 1, 1), "Y") == doctest::Approx(0.0));
  CHECK_THROWS_AS(exact_strength_var(coupled_ar1(0.0), "Y"), UsageError);
  // Noiseless target driven by the other component.
  CHECK(std::isinf(exact_strength_var(bivariate(0.5, 0.0, 0.8, 0.0, 1, 0), "Y")));
  CHECK(exact_strength_var(bivariate(0.5, 0.0, 0.0, 0.3, 1, 0), "Y") == 0.0);
}

TEST_CASE("exact strength matches the single-arrow formula on random VAR(1)") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> coef(-0.6, 0.6), var(0.2, 2.0);
  for (int rep = 0; rep < 20; ++rep) {
    const auto m = bivariate(coef(rng), coef(rng), coef(rng), coef(rng), var(rng), var(rng));
    const double gxx = iterate_covariance(m)(0, 0);
    const double byx = m.lags[0](1, 0);
    const double expected = 0.5 * std::log1p(byx * byx * gxx / m.noise_vars(1));
    CHECK(exact_strength_var(m, "Y") == doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("window model") {
  const auto w = window_model(coupled_ar1(0.25), "Y");
  CHECK(w.sem.dag().nodes() == std::vector<std::string>{"X[t-1]", "Y[t-1]", "Y[t]"});
  CHECK(w.cut == EdgeSet{{"X[t-1]", "Y[t]"}});
  CHECK(w.sem.coefficient("X[t-1]", "Y[t]") == doctest::Approx(std::sqrt(1 - 0.0625)));
  CHECK(w.sem.noise_variance("Y[t]") == doctest::Approx(0.0625));
  const auto sigma = observational_covariance(w.sem).matrix;
  CHECK(sigma(2, 2) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("transfer entropy of the coupled pair") {
  for (int m = 1; m <= 10; ++m) {
    const double eps = std::ldexp(1.0, -m);
    CHECK(transfer_entropy_var(coupled_ar1(eps), "Y") == doctest::Approx(0.5 * std::log(2 - eps * eps)).epsilon(1e-10));
  }
  CHECK(transfer_entropy_var(coupled_ar1(1e-5), "Y") == doctest::Approx(0.5 * std::numbers::ln2).epsilon(1e-9));
  CHECK_THROWS(transfer_entropy_var(bivariate(0.5, 0.0, 0.8, 0.0, 1, 0), "Y"));
}

TEST_CASE("transfer entropy matches a long autoregression") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> coef(-0.6, 0.6), var(0.2, 2.0);
  for (int rep = 0; rep < 10; ++rep) {
    const auto m = bivariate(coef(rng), coef(rng), coef(rng), coef(rng), var(rng), var(rng));
    CHECK(transfer_entropy_var(m, "Y") == doctest::Approx(te_by_long_regression(m, 80)).epsilon(1e-8));
  }
}

TEST_CASE("perturbed copy chain closed forms") {
  for (double eps : {0.05, 0.1, 0.25, 0.4}) {
    const auto v = exact_perturbed_copy(eps);
    CHECK(v.transfer_entropy == doctest::Approx(h2(2 * eps * (1 - eps)) - h2(eps)).epsilon(1e-12));
    CHECK(v.causal_strength == doctest::Approx(1 - h2(eps)).epsilon(1e-12));
    const auto te_chain = unroll_bivariate_chain(reference::perturbed_copy_chain(eps, 4));
    CHECK(std::abs(v.transfer_entropy - transfer_entropy_exact(te_chain, 3)) < 1e-10);
    const auto cs_chain = unroll_bivariate_chain(reference::perturbed_copy_chain(eps, 3));
    CHECK(std::abs(v.causal_strength - causal_strength(cs_chain.model, {{cs_chain.x[2], cs_chain.y[3]}})) < 1e-10);
    CHECK(v.causal_strength > v.transfer_entropy);
  }
  CHECK(exact_perturbed_copy(0.0).transfer_entropy == 0.0);
  CHECK(exact_perturbed_copy(0.0).causal_strength == 1.0);
  CHECK(exact_perturbed_copy(0.5).causal_strength == doctest::Approx(0.0));
  CHECK(exact_perturbed_copy(0.1, LogBase::nats).causal_strength ==
        doctest::Approx(exact_perturbed_copy(0.1).causal_strength * std::numbers::ln2));
  double prev = 2.0;
  for (int i = 0; i <= 50; ++i) {
    const double cs = exact_perturbed_copy(0.01 * i).causal_strength;
    CHECK(cs < prev);
    prev = cs;
  }
}

TEST_CASE("trajectory estimate tracks the exact strength") {
  EstimationConfig cfg;
  cfg.seed = 3;
  const auto model = coupled_ar1(0.25);
  const auto traj = simulate_var(model, 50000, 21);
  const double est = estimate_strength_ts(traj, 1, "Y", cfg);
  CHECK(est == doctest::Approx(2 * std::numbers::ln2).epsilon(0.12));
  CHECK(estimate_strength_ts(traj, 1, "Y", cfg) == est);
  // Independent components: no strength.
  const auto null_traj = simulate_var(bivariate(0.5, 0.0, 0.0, 0.5, 1, 1), 50000, 22);
  CHECK(std::abs(estimate_strength_ts(null_traj, 1, "Y", cfg)) < 0.05);
}

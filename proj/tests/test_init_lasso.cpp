#include <doctest.h>

#include <cmath>
#include <random>

#include "mmdglm/errors.hpp"
#include "mmdglm/gaussian_mmd.hpp"
#include "mmdglm/init_lasso.hpp"
#include "mmdglm/logistic_mmd.hpp"

using namespace mmdglm;

namespace {

MatrixXd normal_matrix(Index n, Index p, std::mt19937_64& rng) {
  std::normal_distribution<double> z;
  MatrixXd x(n, p);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) x(i, j) = z(rng);
  return x;
}

// |x_j'r/n| <= lambda off the support, = lambda sign(beta_j) on it.
double kkt_gap(const MatrixXd& x, const VectorXd& y, const VectorXd& beta, double lambda) {
  const VectorXd g = x.transpose() * (y - x * beta) / static_cast<double>(x.rows());
  double worst = 0.0;
  for (Index j = 0; j < beta.size(); ++j) {
    const double v = beta[j] == 0.0 ? std::max(0.0, std::abs(g[j]) - lambda)
                                    : std::abs(g[j] - lambda * (beta[j] > 0 ? 1.0 : -1.0));
    worst = std::max(worst, v);
  }
  return worst;
}

}  // namespace

TEST_SUITE("init_lasso") {

TEST_CASE("lasso is zero at lambda max") {
  std::mt19937_64 rng(1);
  const MatrixXd x = normal_matrix(30, 6, rng);
  const VectorXd y = x.col(0) * 2.0 + normal_matrix(30, 1, rng).col(0);
  const double lmax = lasso_lambda_max(x, y, Family::gaussian);
  CHECK(lmax == doctest::Approx((x.transpose() * y).cwiseAbs().maxCoeff() / 30.0));
  CHECK(lasso_linear(x, y, lmax).beta.cwiseAbs().maxCoeff() == 0.0);
  CHECK(lasso_linear(x, y, 0.9 * lmax).beta.cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("orthonormal design has the closed form solution") {
  std::mt19937_64 rng(2);
  const Index n = 40;
  const MatrixXd raw = normal_matrix(n, 5, rng);
  Eigen::HouseholderQR<MatrixXd> qr(raw);
  const MatrixXd x = MatrixXd(qr.householderQ()).leftCols(5) * std::sqrt(static_cast<double>(n));
  const VectorXd y = normal_matrix(n, 1, rng).col(0) * 3.0;
  const double lambda = 0.4;
  const LassoFit fit = lasso_linear(x, y, lambda);
  CHECK(fit.converged);
  const VectorXd expected = soft_threshold(VectorXd(x.transpose() * y / static_cast<double>(n)), lambda);
  CHECK((fit.beta - expected).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("lambda zero matches least squares") {
  std::mt19937_64 rng(3);
  const MatrixXd x = normal_matrix(50, 4, rng);
  const VectorXd y = normal_matrix(50, 1, rng).col(0);
  const LassoFit fit = lasso_linear(x, y, 0.0, LassoOptions{100000, 1e-12});
  const VectorXd ls = x.colPivHouseholderQr().solve(y);
  CHECK((fit.beta - ls).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("KKT conditions hold at exit") {
  std::mt19937_64 rng(4);
  const MatrixXd x = normal_matrix(40, 15, rng);
  VectorXd beta = VectorXd::Zero(15);
  beta.head(3) << 2.0, -1.0, 0.5;
  const VectorXd y = x * beta + normal_matrix(40, 1, rng).col(0);
  for (double lambda : {0.5, 0.1, 0.02}) {
    const LassoFit fit = lasso_linear(x, y, lambda);
    CHECK(fit.converged);
    CHECK(kkt_gap(x, y, fit.beta, lambda) <= 1e-6);
  }
}

TEST_CASE("zero variance column is skipped with a warning") {
  std::mt19937_64 rng(5);
  MatrixXd x = normal_matrix(20, 3, rng);
  x.col(1).setZero();
  const VectorXd y = x.col(0);
  const LassoFit fit = lasso_linear(x, y, 0.0);
  CHECK(fit.beta[1] == 0.0);
  CHECK(fit.warnings.size() == 1);
}

TEST_CASE("logistic lasso basics") {
  std::mt19937_64 rng(6);
  const MatrixXd x = normal_matrix(60, 4, rng);
  std::bernoulli_distribution coin(0.5);
  VectorXd y(60);
  for (Index i = 0; i < 60; ++i) y[i] = sigmoid(1.5 * x(i, 0)) > std::uniform_real_distribution<double>()(rng) ? 1 : 0;

  const double lmax = lasso_lambda_max(x, y, Family::binomial);
  CHECK(lmax == doctest::Approx((x.transpose() * (y.array() - 0.5).matrix()).cwiseAbs().maxCoeff() / 60.0));
  CHECK(logistic_lasso(x, y, lmax * 1.0001).beta.cwiseAbs().maxCoeff() == 0.0);
  const LassoFit fit = logistic_lasso(x, y, 0.02);
  CHECK(fit.converged);
  CHECK(fit.beta[0] > 0.5);
}

TEST_CASE("logistic lasso matches a grid search on a small instance") {
  std::mt19937_64 rng(7);
  const MatrixXd x = normal_matrix(20, 3, rng);
  VectorXd y(20);
  std::uniform_real_distribution<double> u;
  for (Index i = 0; i < 20; ++i) y[i] = u(rng) < sigmoid(x(i, 0) - 0.5 * x(i, 2)) ? 1 : 0;
  const double lambda = 0.05;
  const LassoFit fit = logistic_lasso(x, y, lambda);
  const double got = logistic_lasso_objective(x, y, fit.beta, lambda);

  // coarse grid then a fine grid around the best coarse point
  VectorXd best = VectorXd::Zero(3);
  double best_val = logistic_lasso_objective(x, y, best, lambda);
  for (double width : {0.1, 0.01, 0.001, 0.0001}) {
    const VectorXd center = best;
    for (int a = -20; a <= 20; ++a)
      for (int b = -20; b <= 20; ++b)
        for (int c = -20; c <= 20; ++c) {
          VectorXd t = center + width * Eigen::Vector3d(a, b, c);
          const double v = logistic_lasso_objective(x, y, t, lambda);
          if (v < best_val) {
            best_val = v;
            best = t;
          }
        }
  }
  CHECK(got <= best_val + 1e-6);
  CHECK(std::abs(got - best_val) < 1e-6);
}

TEST_CASE("logistic lasso on separable data without penalty stops unconverged") {
  MatrixXd x(6, 1);
  x << -3, -2, -1, 1, 2, 3;
  VectorXd y(6);
  y << 0, 0, 0, 1, 1, 1;
  LogisticLassoOptions opts;
  opts.max_iter = 300;
  const LassoFit fit = logistic_lasso(x, y, 0.0, opts);
  CHECK_FALSE(fit.converged);
  CHECK(fit.beta[0] > 3.0);
  VectorXd ones = VectorXd::Ones(6);
  CHECK_THROWS_AS(logistic_lasso(x, ones, 0.0), ContractViolation);
}

TEST_CASE("gradient at zero") {
  std::mt19937_64 rng(8);
  const MatrixXd x = normal_matrix(10, 2, rng);
  VectorXd y(10);
  y << 1, 0, 1, 1, 0, 0, 0, 1, 1, 0;
  // With a single prox-gradient step budget the first move is along X'(y - 0.5).
  const VectorXd g = x.transpose() * (VectorXd::Constant(10, 0.5) - y) / 10.0;
  LogisticLassoOptions opts;
  opts.max_iter = 1;
  const LassoFit fit = logistic_lasso(x, y, 0.0, opts);
  CHECK(fit.beta.normalized().dot(-g.normalized()) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("sigma2 from residuals") {
  MatrixXd x = MatrixXd::Zero(2, 1);
  VectorXd y(2);
  y << 2.0, -2.0;
  CHECK(init_sigma2_from_residuals(VectorXd::Zero(1), x, y) == 4.0);
  y.setZero();
  CHECK(init_sigma2_from_residuals(VectorXd::Zero(1), x, y) == kSigma2Floor);

  std::mt19937_64 rng(9);
  Dataset d;
  d.x = normal_matrix(15, 3, rng);
  d.y = normal_matrix(15, 1, rng).col(0);
  const VectorXd b = normal_matrix(3, 1, rng).col(0);
  CHECK(init_sigma2_from_residuals(b, d.x, d.y) == update_sigma2(b, d));
}

TEST_CASE("initialize is deterministic and returns a consistent state") {
  std::mt19937_64 rng(10);
  Dataset d;
  d.x = normal_matrix(50, 8, rng);
  VectorXd beta = VectorXd::Zero(8);
  beta[0] = 3.0;
  beta[3] = -2.0;
  d.y = d.x * beta + normal_matrix(50, 1, rng).col(0);
  InitOptions opts;
  opts.seed = 42;
  const Initialization a = initialize(d, opts);
  const Initialization b = initialize(d, opts);
  CHECK(a.lasso.beta == b.lasso.beta);
  CHECK(a.cv_lambda == b.cv_lambda);
  CHECK(a.state.theta == a.lasso.beta);
  CHECK(a.state.eta == a.lasso.beta);
  CHECK(a.state.gamma.cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(a.state.sigma2.has_value());
  CHECK(*a.state.sigma2 == doctest::Approx(init_sigma2_from_residuals(a.lasso.beta, d.x, d.y)));
  CHECK(a.lasso.beta[0] > 2.0);
  CHECK(a.lasso.beta[3] < -1.0);

  opts.intercept = true;
  d.y.array() += 5.0;
  const Initialization c = initialize(d, opts);
  REQUIRE(c.lasso.beta.size() == 9);
  CHECK(c.lasso.beta[0] == doctest::Approx(5.0).epsilon(0.1));
}

TEST_CASE("binomial initializer has no sigma2") {
  std::mt19937_64 rng(11);
  Dataset d;
  d.family = Family::binomial;
  d.x = normal_matrix(60, 5, rng);
  d.y.resize(60);
  std::uniform_real_distribution<double> u;
  for (Index i = 0; i < 60; ++i) d.y[i] = u(rng) < sigmoid(2.0 * d.x(i, 1)) ? 1 : 0;
  const Initialization init = initialize(d, InitOptions{});
  CHECK_FALSE(init.state.sigma2.has_value());
  CHECK(init.lasso.beta[1] > 0.0);
}

}  // TEST_SUITE

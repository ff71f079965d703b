#include <doctest.h>

#include <cmath>
#include <random>

#include "mmdglm/errors.hpp"
#include "mmdglm/optimizer.hpp"

using namespace mmdglm;

namespace {

Dataset linear_data(Index n, Index p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  Dataset d;
  d.x.resize(n, p);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) d.x(i, j) = z(rng);
  VectorXd beta = VectorXd::Zero(p);
  beta[0] = 2.0;
  beta[1] = -1.5;
  d.y = d.x * beta;
  for (Index i = 0; i < n; ++i) d.y[i] += 0.5 * z(rng);
  return d;
}

}  // namespace

TEST_SUITE("optimizer") {

TEST_CASE("soft threshold") {
  CHECK(soft_threshold(3.0, 1.0) == 2.0);
  CHECK(soft_threshold(-3.0, 1.0) == -2.0);
  CHECK(soft_threshold(0.5, 1.0) == 0.0);
  CHECK(soft_threshold(1.0, 1.0) == 0.0);
  CHECK(soft_threshold(-1.0, 1.0) == 0.0);
  CHECK(soft_threshold(2.5, 0.0) == 2.5);
  CHECK_FALSE(std::signbit(soft_threshold(-0.5, 1.0)));

  VectorXd a(4);
  a << -2.0, -0.1, 0.1, 4.0;
  VectorXd expected(4);
  expected << -1.5, 0.0, 0.0, 3.5;
  CHECK(soft_threshold(a, 0.5) == expected);
}

TEST_CASE("soft threshold minimizes the scalar lasso problem") {
  for (double a = -2.0; a <= 2.0; a += 0.37) {
    for (double b : {0.0, 0.3, 1.1}) {
      double best = 0.0, best_val = 1e300;
      for (int k = -40000; k <= 40000; ++k) {
        const double z = k * 1e-4;
        const double v = b * std::abs(z) + 0.5 * (z - a) * (z - a);
        if (v < best_val) {
          best_val = v;
          best = z;
        }
      }
      CHECK(std::abs(soft_threshold(a, b) - best) <= 1e-4);
    }
  }
}

TEST_CASE("adagrad step") {
  VectorXd theta(2), grad(2), acc = VectorXd::Zero(2);
  theta << 1.0, 1.0;
  grad << 2.0, -0.5;
  adagrad_step(theta, grad, acc, 0.1, 0.0);
  CHECK(acc[0] == 4.0);
  CHECK(acc[1] == 0.25);
  CHECK(theta[0] == doctest::Approx(0.9));
  CHECK(theta[1] == doctest::Approx(1.1));
}

TEST_CASE("theta step solves a quadratic subproblem") {
  // loss = 0.5 ||theta - c||^2: minimizer of loss + gamma'theta + rho/2 ||theta - eta||^2
  VectorXd c(3), eta(3), gamma(3);
  c << 1.0, -2.0, 0.5;
  eta << 0.5, 0.0, 0.0;
  gamma << 0.1, -0.2, 0.0;
  AdmmConfig cfg;
  cfg.inner_max_iter = 20000;
  cfg.inner_tol = 1e-12;
  const VectorXd expected = (c - gamma + cfg.rho * eta) / (1.0 + cfg.rho);
  const InnerResult r =
      theta_step([&](const VectorXd& t) { VectorXd g = t - c; return g; }, VectorXd::Zero(3), eta, gamma, cfg);
  CHECK(r.converged);
  CHECK((r.theta - expected).norm() < 1e-6);
}

TEST_CASE("config validation") {
  AdmmConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.rho = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ParameterDomainError);
  cfg = AdmmConfig{};
  cfg.outer_max_iter = 0;
  CHECK_THROWS_AS(cfg.validate(), ParameterDomainError);
}

TEST_CASE("admm contract on a small gaussian problem") {
  const Dataset d = linear_data(60, 6, 1);
  const MmdProblem problem(d, Variant::local, default_bandwidths(d));
  const ParamState init = ParamState::from_theta(VectorXd::Zero(6), 1.0);
  const double lambda = 1e-3;

  std::vector<int> seen;
  bool identity = true;
  const FitResult r = admm_fit(problem, lambda, AdmmConfig{}, init,
                               [&](int k, const ParamState& before, const ParamState& after) {
                                 seen.push_back(k);
                                 const VectorXd expected = before.gamma + 1.0 * (after.theta - after.eta);
                                 identity = identity && expected == after.gamma;
                               });
  CHECK(identity);
  CHECK(r.converged);
  CHECK(r.outer_iters == static_cast<int>(seen.size()));
  CHECK(r.primal_residuals.size() == static_cast<std::size_t>(r.outer_iters));
  CHECK(r.dual_residuals.size() == static_cast<std::size_t>(r.outer_iters));
  CHECK(r.objective_trace.size() == static_cast<std::size_t>(r.outer_iters));
  CHECK(r.primal_residuals.back() <= 1e-3);
  CHECK(r.dual_residuals.back() <= 1e-3);
  CHECK((r.state.theta - r.state.eta).norm() <= 1e-3);
  REQUIRE(r.state.sigma2.has_value());
  CHECK(*r.state.sigma2 > 0.0);
  // the two true signals are recovered with the right signs
  CHECK(r.coefficients()[0] > 1.0);
  CHECK(r.coefficients()[1] < -0.5);
}

TEST_CASE("large lambda zeroes eta") {
  const Dataset d = linear_data(40, 5, 2);
  const MmdProblem problem(d, Variant::local, default_bandwidths(d));
  VectorXd start(5);
  start << 1.0, -1.0, 0.5, 0.0, 0.2;
  const ParamState init = ParamState::from_theta(start, 1.0);
  const double lambda = 10.0 * start.cwiseAbs().maxCoeff() + 10.0;
  const FitResult r = admm_fit(problem, lambda, AdmmConfig{}, init);
  CHECK(r.coefficients().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("admm is deterministic") {
  const Dataset d = linear_data(50, 8, 3);
  const MmdProblem problem(d, Variant::full, default_bandwidths(d));
  const ParamState init = ParamState::from_theta(VectorXd::Zero(8), 1.0);
  const FitResult a = admm_fit(problem, 2e-3, AdmmConfig{}, init);
  const FitResult b = admm_fit(problem, 2e-3, AdmmConfig{}, init);
  CHECK(a.state.eta == b.state.eta);
  CHECK(a.state.theta == b.state.theta);
  CHECK(a.objective_trace == b.objective_trace);
  CHECK(a.outer_iters == b.outer_iters);
}

TEST_CASE("eta is exactly sparse") {
  const Dataset d = linear_data(60, 10, 4);
  const MmdProblem problem(d, Variant::local, default_bandwidths(d));
  const FitResult r = admm_fit(problem, 5e-3, AdmmConfig{}, ParamState::from_theta(VectorXd::Zero(10), 1.0));
  int zeros = 0;
  for (Index j = 0; j < 10; ++j) zeros += r.coefficients()[j] == 0.0;
  CHECK(zeros > 0);
}

TEST_CASE("intercept coordinate is not penalized") {
  Dataset d = linear_data(60, 3, 5);
  d.y.array() += 3.0;
  const MmdProblem problem(d, Variant::local, default_bandwidths(d), true);
  REQUIRE(problem.dim() == 4);
  const FitResult r = admm_fit(problem, 1.0, AdmmConfig{}, ParamState::from_theta(VectorXd::Zero(4), 1.0));
  CHECK(r.coefficients()[0] != 0.0);
  CHECK(r.coefficients().tail(3).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("admm input errors") {
  const Dataset d = linear_data(20, 3, 6);
  const MmdProblem problem(d, Variant::local, default_bandwidths(d));
  CHECK_THROWS_AS(admm_fit(problem, 0.1, AdmmConfig{}, ParamState::from_theta(VectorXd::Zero(4), 1.0)),
                  ContractViolation);
  CHECK_THROWS_AS(admm_fit(problem, -0.1, AdmmConfig{}, ParamState::from_theta(VectorXd::Zero(3), 1.0)),
                  ParameterDomainError);
  CHECK_THROWS_AS(admm_fit(problem, 0.1, AdmmConfig{}, ParamState::from_theta(VectorXd::Zero(3), std::nullopt)),
                  ContractViolation);
}

TEST_CASE("divergence surfaces as an error carrying the iterate") {
  const Dataset d = linear_data(20, 3, 7);
  const MmdProblem problem(d, Variant::local, default_bandwidths(d));
  VectorXd bad = VectorXd::Zero(3);
  bad[1] = std::numeric_limits<double>::infinity();
  try {
    admm_fit(problem, 0.1, AdmmConfig{}, ParamState::from_theta(bad, 1.0));
    FAIL("expected an exception");
  } catch (const SolverDivergenceError& e) {
    CHECK(e.iterate().size() == 3);
  } catch (const NumericInputError&) {
    // rejected up front, equally acceptable
  }
}

}  // TEST_SUITE

#include <doctest.h>

#include <cmath>
#include <random>

#include "mmdglm/errors.hpp"
#include "mmdglm/logistic_mmd.hpp"
#include "mmdglm/reference.hpp"
#include "oracles.hpp"

using namespace mmdglm;

namespace {

Dataset random_binary(Index n, Index p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  std::bernoulli_distribution coin(0.5);
  Dataset d;
  d.family = Family::binomial;
  d.x.resize(n, p);
  d.y.resize(n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < p; ++j) d.x(i, j) = z(rng);
    d.y[i] = coin(rng) ? 1.0 : 0.0;
  }
  return d;
}

// theta with x'theta = logit(pi) for x = e_1.
VectorXd theta_for(double pi) {
  VectorXd t(1);
  t[0] = std::log(pi / (1 - pi));
  return t;
}

}  // namespace

TEST_SUITE("logistic_mmd") {

TEST_CASE("sigmoid") {
  CHECK(sigmoid(0.0) == 0.5);
  CHECK(sigmoid(-std::log(3.0)) == doctest::Approx(0.25).epsilon(1e-15));
  // 1 - 4.25e-18 rounds to 1 in binary64; the lower tail keeps the digits.
  CHECK(sigmoid(40.0) == 1.0);
  CHECK(sigmoid(-40.0) == doctest::Approx(std::exp(-40.0)).epsilon(1e-15));
  CHECK(sigmoid(-40.0) > 0.0);
  CHECK(std::isfinite(sigmoid(1e4)));
  CHECK(sigmoid(-1e4) >= 0.0);
  CHECK(sigmoid(1e4) == 1.0);
  for (double z : {-30.0, -2.0, 0.3, 7.0}) CHECK(sigmoid(z) + sigmoid(-z) == doctest::Approx(1.0));
}

TEST_CASE("local loss values") {
  const VectorXd x = VectorXd::Ones(1);
  LogisticLossParams p{theta_for(0.5), 0.5};
  CHECK(local_loss_logistic(p, x, 0) == doctest::Approx(-0.1875).epsilon(1e-15));
  CHECK(local_loss_logistic(p, x, 0) == doctest::Approx(oracle::logistic_local_enum(0.5, 0, 0.5)).epsilon(1e-15));

  LogisticLossParams sure{VectorXd::Constant(1, 60.0), kBinaryResponseBandwidth};
  CHECK(local_loss_logistic(sure, x, 1) == doctest::Approx(-0.5 * kBinaryResponseBandwidth));
  CHECK(local_loss_logistic(sure, x, 1) == doctest::Approx(-0.353553).epsilon(1e-6));
}

TEST_CASE("pairwise loss values") {
  const VectorXd x = VectorXd::Ones(1);
  LogisticLossParams p{theta_for(0.5), 0.5};
  CHECK(pairwise_loss_logistic(p, x, -x, 0) == doctest::Approx(-0.1875).epsilon(1e-15));
  CHECK(pairwise_loss_logistic(p, x, -x, 1) == doctest::Approx(-0.1875).epsilon(1e-15));
  LogisticLossParams tiny{VectorXd::Constant(1, 0.8), 1e-12};
  CHECK(std::abs(pairwise_loss_logistic(tiny, x, 0.3 * x, 1)) < 1e-11);
}

TEST_CASE("losses match discrete enumeration") {
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> z;
  for (int k = 0; k < 200; ++k) {
    VectorXd theta(3), xi(3), xj(3);
    for (int j = 0; j < 3; ++j) {
      theta[j] = z(rng);
      xi[j] = z(rng);
      xj[j] = z(rng);
    }
    const double h = 0.01 + 0.98 * u(rng);
    const int y = u(rng) < 0.5 ? 0 : 1;
    LogisticLossParams p{theta, h};
    const double pi = oracle::sigmoid(xi.dot(theta));
    const double pj = oracle::sigmoid(xj.dot(theta));
    CHECK(std::abs(local_loss_logistic(p, xi, y) - oracle::logistic_local_enum(pi, y, h)) < 1e-12);
    CHECK(std::abs(pairwise_loss_logistic(p, xi, xj, y) - oracle::logistic_pairwise_enum(pi, pj, y, h)) < 1e-12);
  }
}

TEST_CASE("label symmetry") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> z;
  for (int k = 0; k < 20; ++k) {
    VectorXd theta(2), x(2);
    theta << z(rng), z(rng);
    x << z(rng), z(rng);
    LogisticLossParams p{theta, 0.6}, q{-theta, 0.6};
    CHECK(local_loss_logistic(p, x, 1) == doctest::Approx(local_loss_logistic(q, x, 0)).epsilon(1e-13));
  }
}

TEST_CASE("objective aggregation") {
  const Dataset d = random_binary(3, 2, 5);
  VectorXd theta(2);
  theta << 0.7, -1.1;
  const Bandwidths bw{0.9, 0.6};
  LogisticLossParams p{theta, bw.h_y};
  double local = 0, full = 0;
  for (Index i = 0; i < 3; ++i) {
    const VectorXd xi = d.x.row(i).transpose();
    local += local_loss_logistic(p, xi, static_cast<int>(d.y[i]));
    for (Index j = 0; j < 3; ++j) {
      const VectorXd xj = d.x.row(j).transpose();
      full += gaussian_kernel_x(xi, xj, bw.h_x) * pairwise_loss_logistic(p, xi, xj, static_cast<int>(d.y[i]));
    }
  }
  CHECK(objective_logistic(Variant::local, theta, d, bw) == doctest::Approx(local / 3).epsilon(1e-14));
  CHECK(objective_logistic(Variant::full, theta, d, bw) == doctest::Approx(full / 9).epsilon(1e-13));

  const double h = bw.h_y;
  CHECK(objective_logistic(Variant::local, VectorXd::Zero(2), d, bw) == doctest::Approx(h * h / 4 - 0.5 * h));

  const Dataset one = random_binary(1, 2, 6);
  CHECK(objective_logistic(Variant::full, theta, one, bw) ==
        doctest::Approx(objective_logistic(Variant::local, theta, one, bw)).epsilon(1e-14));
}

TEST_CASE("local gradient") {
  Dataset one;
  one.family = Family::binomial;
  one.x = MatrixXd::Ones(1, 1);
  one.y = VectorXd::Zero(1);
  // h_y must stay below 1 for the kernel; the scalar value scales with h_y^2.
  const double h = 0.999;
  CHECK(grad_local_logistic(VectorXd::Zero(1), one, h)[0] == doctest::Approx(0.25 * h * h).epsilon(1e-14));

  Dataset bal;
  bal.family = Family::binomial;
  bal.x = MatrixXd::Ones(4, 2);
  bal.y = VectorXd(4);
  bal.y << 0, 1, 0, 1;
  CHECK(grad_local_logistic(VectorXd::Zero(2), bal, 0.5).cwiseAbs().maxCoeff() < 1e-16);
}

TEST_CASE("gradients match finite differences") {
  std::mt19937_64 rng(71);
  std::normal_distribution<double> z;
  for (int rep = 0; rep < 10; ++rep) {
    const Dataset d = random_binary(7, 3, 200 + rep);
    VectorXd theta(3);
    theta << z(rng), z(rng), z(rng);
    const Bandwidths bw{1.1, 0.6};
    for (Variant v : {Variant::local, Variant::full}) {
      auto f = [&](const VectorXd& t) { return objective_logistic(v, t, d, bw); };
      const VectorXd fd = oracle::central_gradient(f, theta, 1e-5);
      const VectorXd g = v == Variant::local ? grad_local_logistic(theta, d, bw.h_y)
                                             : grad_pairwise_logistic(theta, d, bw);
      CHECK((g - fd).norm() / std::max(1e-12, fd.norm()) < 1e-5);
    }
  }
}

TEST_CASE("pairwise gradient limits") {
  const Dataset d = random_binary(6, 2, 12);
  const VectorXd g = grad_pairwise_logistic(VectorXd::Constant(2, 0.4), d, Bandwidths{1.0, 1e-12});
  CHECK(g.cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("parallel pairwise kernels match the serial reference") {
  const Dataset d = random_binary(40, 4, 19);
  VectorXd theta(4);
  theta << 0.2, -0.5, 1.0, 0.1;
  const MatrixXd gram = gram_matrix(d.x, 1.3);
  CHECK(objective_full_logistic(theta, d, 0.6, gram) ==
        doctest::Approx(reference::objective_full_logistic(theta, d, 0.6, gram)).epsilon(1e-12));
  const VectorXd a = grad_pairwise_logistic(theta, d, 0.6, gram);
  const VectorXd b = reference::grad_pairwise_logistic(theta, d, 0.6, gram);
  CHECK((a - b).norm() <= 1e-12 * b.norm());
}

TEST_CASE("convexity region") {
  const VectorXd x = VectorXd::Ones(1);
  CHECK(convexity_region_check_logistic(theta_for(0.5), x, 1));
  CHECK(!convexity_region_check_logistic(theta_for(0.9), x, 0));
  CHECK(convexity_region_check_logistic(theta_for(0.6), x, 0));
  CHECK(!convexity_region_check_logistic(theta_for(0.2), x, 1));
  // Walk from ln 2 to a linear predictor whose sigmoid is exactly 2/3.
  double z = std::log(2.0);
  for (int k = 0; k < 64 && sigmoid(z) != 2.0 / 3.0; ++k)
    z = std::nextafter(z, sigmoid(z) > 2.0 / 3.0 ? -1.0 : 1.0);
  REQUIRE(sigmoid(z) == 2.0 / 3.0);
  CHECK(convexity_region_check_logistic(VectorXd::Constant(1, z), x, 0));
  CHECK(!convexity_region_check_logistic(VectorXd::Constant(1, z + 1e-9), x, 0));
}

TEST_CASE("input validation") {
  LogisticLossParams p{VectorXd::Zero(1), 1.0};
  CHECK_THROWS_AS(p.validate(), ParameterDomainError);
  p.h_y = 0.5;
  CHECK_THROWS_AS(local_loss_logistic(p, VectorXd::Ones(1), 2), ContractViolation);
  Dataset g = random_binary(3, 1, 1);
  g.family = Family::gaussian;
  CHECK_THROWS_AS(objective_logistic(Variant::local, VectorXd::Zero(1), g, Bandwidths{1, 0.5}), ContractViolation);
}

}  // TEST_SUITE

#include "mmdglm/logistic_mmd.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mmdglm/errors.hpp"
#include "mmdglm/parallel.hpp"

namespace mmdglm {

namespace {

constexpr double kProbClamp = 1e-15;

void check_h(double h_y) {
  if (!(h_y > 0.0 && h_y < 1.0)) {
    throw ParameterDomainError("logistic h_y must lie in (0, 1), got " + std::to_string(h_y));
  }
}

void check_binomial(const Dataset& data, const VectorXd& theta) {
  if (data.family != Family::binomial) throw ContractViolation("expected a binomial dataset");
  if (data.n() == 0) throw ContractViolation("empty dataset");
  if (theta.size() != data.p()) {
    throw ContractViolation("theta has length " + std::to_string(theta.size()) + ", expected " +
                            std::to_string(data.p()));
  }
}

int as_label(double y) {
  if (y == 0.0) return 0;
  if (y == 1.0) return 1;
  throw ContractViolation("binary response must be 0 or 1, got " + std::to_string(y));
}

// h^2 pi^{2(1-y)} (1-pi)^{2y} - h/2, with pi = sigmoid(z).
double local_from_linear(double z, int y, double h) {
  const double base = std::clamp(y == 0 ? sigmoid(z) : sigmoid(-z), kProbClamp, 1.0 - kProbClamp);
  return h * h * base * base - 0.5 * h;
}

double pairwise_from_probs(double pi_i, double pi_j, int y_i, double h) {
  const double q = 1.0 - h;
  const double term1 = 0.5 * h * (1.0 - h * (pi_i + pi_j) + 2.0 * h * pi_i * pi_j);
  const double term2 = y_i == 0 ? h * (q * pi_j + (1.0 - pi_j)) : h * (pi_j + q * (1.0 - pi_j));
  return term1 - term2;
}

}  // namespace

void LogisticLossParams::validate() const {
  check_h(h_y);
  if (!theta.allFinite()) throw NumericInputError("theta has non-finite entries");
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double success_probability(const VectorXd& theta, const VectorXd& x) {
  if (theta.size() != x.size()) throw ContractViolation("x and theta differ in length");
  return sigmoid(x.dot(theta));
}

double local_loss_logistic(const LogisticLossParams& params, const VectorXd& x_i, int y_i) {
  params.validate();
  if (y_i != 0 && y_i != 1) throw ContractViolation("y_i must be 0 or 1");
  if (x_i.size() != params.theta.size()) throw ContractViolation("x_i and theta differ in length");
  return local_from_linear(x_i.dot(params.theta), y_i, params.h_y);
}

double pairwise_loss_logistic(const LogisticLossParams& params, const VectorXd& x_i,
                              const VectorXd& x_j, int y_i) {
  params.validate();
  if (y_i != 0 && y_i != 1) throw ContractViolation("y_i must be 0 or 1");
  if (x_i.size() != params.theta.size() || x_j.size() != params.theta.size()) {
    throw ContractViolation("x_i, x_j and theta differ in length");
  }
  return pairwise_from_probs(success_probability(params.theta, x_i),
                             success_probability(params.theta, x_j), y_i, params.h_y);
}

double objective_logistic(Variant variant, const VectorXd& theta, const Dataset& data,
                          const Bandwidths& bw) {
  check_binomial(data, theta);
  check_h(bw.h_y);
  if (variant == Variant::full) {
    bw.validate();
    return objective_full_logistic(theta, data, bw.h_y, gram_matrix(data.x, bw.h_x));
  }
  const VectorXd z = data.x * theta;
  double total = 0.0;
  for (Index i = 0; i < z.size(); ++i) total += local_from_linear(z[i], as_label(data.y[i]), bw.h_y);
  return total / static_cast<double>(data.n());
}

double objective_full_logistic(const VectorXd& theta, const Dataset& data, double h_y,
                               const MatrixXd& gram) {
  check_binomial(data, theta);
  check_h(h_y);
  const Index n = data.n();
  if (gram.rows() != n || gram.cols() != n) throw ContractViolation("gram matrix is not n x n");
  const VectorXd z = data.x * theta;
  VectorXd pi(n);
  for (Index i = 0; i < n; ++i) pi[i] = sigmoid(z[i]);
  VectorXd partial(n);
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) {
    const int y_i = data.y[i] == 1.0 ? 1 : 0;
    double acc = 0.0;
    for (Index j = 0; j < n; ++j) acc += gram(i, j) * pairwise_from_probs(pi[i], pi[j], y_i, h_y);
    partial[i] = acc;
  }
  const double nn = static_cast<double>(n);
  return parallel::ordered_sum(partial) / (nn * nn);
}

VectorXd grad_local_logistic(const VectorXd& theta, const Dataset& data, double h_y) {
  check_binomial(data, theta);
  check_h(h_y);
  const VectorXd z = data.x * theta;
  VectorXd w(z.size());
  for (Index i = 0; i < z.size(); ++i) {
    const double pi = sigmoid(z[i]);
    const double q = sigmoid(-z[i]);
    // d/dz of pi^2 is 2 pi^2 q; of q^2 it is -2 pi q^2.
    w[i] = as_label(data.y[i]) == 0 ? 2.0 * pi * pi * q : -2.0 * pi * q * q;
  }
  return (h_y * h_y / static_cast<double>(data.n())) * (data.x.transpose() * w);
}

VectorXd grad_pairwise_logistic(const VectorXd& theta, const Dataset& data,
                                const Bandwidths& bw) {
  bw.validate();
  return grad_pairwise_logistic(theta, data, bw.h_y, gram_matrix(data.x, bw.h_x));
}

VectorXd grad_pairwise_logistic(const VectorXd& theta, const Dataset& data, double h_y,
                                const MatrixXd& gram) {
  check_binomial(data, theta);
  check_h(h_y);
  const Index n = data.n();
  if (gram.rows() != n || gram.cols() != n) throw ContractViolation("gram matrix is not n x n");
  const VectorXd z = data.x * theta;
  VectorXd pi(n), dpi(n);
  for (Index i = 0; i < n; ++i) {
    pi[i] = sigmoid(z[i]);
    dpi[i] = pi[i] * sigmoid(-z[i]);
  }
  // (1-h)^{1-y} - (1-h)^y = h (2y - 1), so with K symmetric the pair sum
  // collapses to x_k weights 2 h^2 pi_k' sum_m K_km (pi_m - y_m).
  VectorXd w(n);
#pragma omp parallel for schedule(static)
  for (Index k = 0; k < n; ++k) {
    double acc = 0.0;
    for (Index m = 0; m < n; ++m) acc += gram(k, m) * (pi[m] - data.y[m]);
    w[k] = 2.0 * h_y * h_y * dpi[k] * acc;
  }
  const double nn = static_cast<double>(n);
  return data.x.transpose() * w / (nn * nn);
}

bool convexity_region_check_logistic(const VectorXd& theta, const VectorXd& x_i, int y_i) {
  if (y_i != 0 && y_i != 1) throw ContractViolation("y_i must be 0 or 1");
  const double pi = success_probability(theta, x_i);
  return y_i == 0 ? pi <= 2.0 / 3.0 : pi >= 1.0 / 3.0;
}

}  // namespace mmdglm

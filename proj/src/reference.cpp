#include "mmdglm/reference.hpp"

#include <cmath>

#include "mmdglm/errors.hpp"
#include "mmdglm/gaussian_mmd.hpp"
#include "mmdglm/kernels.hpp"
#include "mmdglm/logistic_mmd.hpp"

namespace mmdglm::reference {

MatrixXd gram_matrix(const MatrixXd& x, double h_x) {
  const Index n = x.rows();
  MatrixXd gram(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      gram(i, j) = gaussian_kernel_x(x.row(i).transpose(), x.row(j).transpose(), h_x);
    }
  }
  return gram;
}

double objective_full_gaussian(const VectorXd& theta, const Dataset& data, double sigma2,
                               double h_y, const MatrixXd& gram) {
  const GaussianLossParams params{theta, sigma2, h_y};
  const Index n = data.n();
  double total = 0.0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      total += gram(i, j) * pairwise_loss_gaussian(params, data.x.row(i).transpose(),
                                                   data.x.row(j).transpose(), data.y[i]);
    }
  }
  return total / static_cast<double>(n * n);
}

VectorXd grad_pairwise_gaussian(const VectorXd& theta, const Dataset& data, double sigma2,
                                double h_y, const MatrixXd& gram) {
  const Index n = data.n();
  const double s1 = sigma2 + h_y * h_y;
  const double s2 = 2.0 * sigma2 + h_y * h_y;
  VectorXd grad = VectorXd::Zero(theta.size());
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      const VectorXd x_i = data.x.row(i).transpose();
      const VectorXd x_j = data.x.row(j).transpose();
      const VectorXd diff = x_j - x_i;
      const double proj = theta.dot(diff);
      const VectorXd term1 = -h_y / std::pow(s2, 1.5) * proj *
                             std::exp(-0.5 * proj * proj / s2) * diff;
      const double r = data.y[i] - x_j.dot(theta);
      const VectorXd term2 = 2.0 * h_y / std::pow(s1, 1.5) * r * std::exp(-0.5 * r * r / s1) * x_j;
      grad += gram(i, j) * (term1 - term2);
    }
  }
  return grad / static_cast<double>(n * n);
}

double objective_full_logistic(const VectorXd& theta, const Dataset& data, double h_y,
                               const MatrixXd& gram) {
  const LogisticLossParams params{theta, h_y};
  const Index n = data.n();
  double total = 0.0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      total += gram(i, j) * pairwise_loss_logistic(params, data.x.row(i).transpose(),
                                                   data.x.row(j).transpose(),
                                                   static_cast<int>(data.y[i]));
    }
  }
  return total / static_cast<double>(n * n);
}

VectorXd grad_pairwise_logistic(const VectorXd& theta, const Dataset& data, double h_y,
                                const MatrixXd& gram) {
  const Index n = data.n();
  VectorXd grad = VectorXd::Zero(theta.size());
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      const VectorXd x_i = data.x.row(i).transpose();
      const VectorXd x_j = data.x.row(j).transpose();
      const double pi_i = success_probability(theta, x_i);
      const double pi_j = success_probability(theta, x_j);
      const double y_i = data.y[i];
      const VectorXd term1 = 0.5 * h_y * h_y *
                             (pi_i * (1.0 - pi_i) * (2.0 * pi_j - 1.0) * x_i +
                              pi_j * (1.0 - pi_j) * (2.0 * pi_i - 1.0) * x_j);
      const VectorXd term2 = h_y * pi_j * (1.0 - pi_j) *
                             (std::pow(1.0 - h_y, 1.0 - y_i) - std::pow(1.0 - h_y, y_i)) * x_j;
      grad += gram(i, j) * (term1 - term2);
    }
  }
  return grad / static_cast<double>(n * n);
}

}  // namespace mmdglm::reference

#pragma once

#include "mmdglm/kernels.hpp"
#include "mmdglm/types.hpp"

namespace mmdglm {

inline constexpr double kSigma2Floor = 1e-8;

// Parameters of the Gaussian linear model Y | x ~ N(x'theta, sigma2) together
// with the scale of the Gaussian response kernel.
struct GaussianLossParams {
  VectorXd theta;
  double sigma2 = 1.0;
  double h_y = 1.0;

  void validate() const;
};

// E_{Y ~ N(mu, sigma2)} exp(-(Y - y0)^2 / (2 h_y^2))
double expected_gaussian_kernel(double mu, double sigma2, double y0, double h_y);

// Diagonal (i == j) MMD loss for one observation.
double local_loss_gaussian(const GaussianLossParams& params, const VectorXd& x_i, double y_i);

// Pairwise MMD loss l(theta, x_i, x_j, y_i). Not symmetric in (i, j).
double pairwise_loss_gaussian(const GaussianLossParams& params, const VectorXd& x_i,
                              const VectorXd& x_j, double y_i);

// Data-fit term without the penalty.
//   local: (1/n)   sum_i l~(theta, x_i, y_i)
//   full:  (1/n^2) sum_{i,j} K_x(x_i, x_j) l(theta, x_i, x_j, y_i)
double objective_gaussian(Variant variant, const VectorXd& theta, const Dataset& data,
                          double sigma2, const Bandwidths& bw);

// Full objective against a precomputed K_x Gram matrix.
double objective_full_gaussian(const VectorXd& theta, const Dataset& data, double sigma2,
                               double h_y, const MatrixXd& gram);

VectorXd grad_local_gaussian(const VectorXd& theta, const Dataset& data, double sigma2,
                             double h_y);

VectorXd grad_pairwise_gaussian(const VectorXd& theta, const Dataset& data, double sigma2,
                                const Bandwidths& bw);

// O(n^2 + np): the pair sum collapses to X' w with per-row weights w, filled
// in parallel.
VectorXd grad_pairwise_gaussian(const VectorXd& theta, const Dataset& data, double sigma2,
                                double h_y, const MatrixXd& gram);

// (y_i - x_i'theta)^2 <= sigma2 + h_y^2, where l~_i has a PSD Hessian.
bool local_convexity_check_gaussian(const VectorXd& theta, const VectorXd& x_i, double y_i,
                                    double sigma2, double h_y);

// Mean squared residual, floored at kSigma2Floor.
double update_sigma2(const VectorXd& theta, const Dataset& data);

namespace detail {

// Exponent arguments below this are clamped before exp().
inline constexpr double kMinExponent = -745.0;

double clamped_exp(double arg);

}  // namespace detail

}  // namespace mmdglm

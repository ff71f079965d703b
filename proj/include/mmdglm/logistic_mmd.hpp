#pragma once

#include "mmdglm/kernels.hpp"
#include "mmdglm/types.hpp"

namespace mmdglm {

struct LogisticLossParams {
  VectorXd theta;
  double h_y = kBinaryResponseBandwidth;  // geometric kernel parameter, in (0, 1)

  void validate() const;
};

// Logistic sigmoid, branch-stable for large |z|.
double sigmoid(double z);

double success_probability(const VectorXd& theta, const VectorXd& x);

double local_loss_logistic(const LogisticLossParams& params, const VectorXd& x_i, int y_i);

double pairwise_loss_logistic(const LogisticLossParams& params, const VectorXd& x_i,
                              const VectorXd& x_j, int y_i);

double objective_logistic(Variant variant, const VectorXd& theta, const Dataset& data,
                          const Bandwidths& bw);

double objective_full_logistic(const VectorXd& theta, const Dataset& data, double h_y,
                               const MatrixXd& gram);

// Exact gradient of the local objective; includes the h_y^2 factor of l~.
VectorXd grad_local_logistic(const VectorXd& theta, const Dataset& data, double h_y);

VectorXd grad_pairwise_logistic(const VectorXd& theta, const Dataset& data,
                                const Bandwidths& bw);

VectorXd grad_pairwise_logistic(const VectorXd& theta, const Dataset& data, double h_y,
                                const MatrixXd& gram);

// pi in [0, 2/3] when y = 0, pi in [1/3, 1] when y = 1.
bool convexity_region_check_logistic(const VectorXd& theta, const VectorXd& x_i, int y_i);

}  // namespace mmdglm

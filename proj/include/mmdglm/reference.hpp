#pragma once

#include "mmdglm/types.hpp"

// Serial, pair-by-pair transcriptions of the O(n^2) objectives and gradients.
// Every pair's vector contribution is formed explicitly, O(n^2 p). Kept for
// testing the parallel kernels and for the benchmark; not used by the solver.
namespace mmdglm::reference {

MatrixXd gram_matrix(const MatrixXd& x, double h_x);

double objective_full_gaussian(const VectorXd& theta, const Dataset& data, double sigma2,
                               double h_y, const MatrixXd& gram);
VectorXd grad_pairwise_gaussian(const VectorXd& theta, const Dataset& data, double sigma2,
                                double h_y, const MatrixXd& gram);

double objective_full_logistic(const VectorXd& theta, const Dataset& data, double h_y,
                               const MatrixXd& gram);
VectorXd grad_pairwise_logistic(const VectorXd& theta, const Dataset& data, double h_y,
                                const MatrixXd& gram);

}  // namespace mmdglm::reference

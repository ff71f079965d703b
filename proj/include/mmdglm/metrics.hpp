#pragma once

#include <optional>

#include "mmdglm/types.hpp"

namespace mmdglm {

enum class ErrorNorm {
  mean_squared,  // ||b - beta||^2 / p
  l2,            // ||b - beta||
  squared,       // ||b - beta||^2
};

double estimation_error(const VectorXd& beta_hat, const VectorXd& beta_true,
                        ErrorNorm norm = ErrorNorm::mean_squared);

struct SelectionLoss {
  int fp = 0;
  int fn = 0;
  int fsl = 0;
};

// Selected = exact nonzeros of beta_hat.
SelectionLoss selection_loss(const VectorXd& beta_hat, const VectorXd& beta_true);

// (1/m) ||y - X b||^2
double prediction_error(const VectorXd& beta_hat, const MatrixXd& x_test, const VectorXd& y_test);

// Percent of test points with predicted class != label. Predicts 1 iff
// sigmoid(x'b) > 0.5.
double misclassification_error(const VectorXd& beta_hat, const MatrixXd& x_test,
                               const VectorXd& y_test);

struct EvalReport {
  double mse = 0.0;
  int fp = 0;
  int fn = 0;
  int fsl = 0;
  std::optional<double> pe;          // gaussian
  std::optional<double> me_percent;  // binomial
};

EvalReport evaluate(const VectorXd& beta_hat, const VectorXd& beta_true, const Dataset& test);

}  // namespace mmdglm

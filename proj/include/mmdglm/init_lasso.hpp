#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mmdglm/optimizer.hpp"
#include "mmdglm/types.hpp"

namespace mmdglm {

struct LassoFit {
  VectorXd beta;
  double lambda = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<std::string> warnings;
};

struct LassoOptions {
  int max_iter = 10000;
  double kkt_tol = 1e-7;
};

// Cyclic coordinate descent on (1/(2n))||y - X beta||^2 + lambda ||beta||_1.
// `warm` seeds beta when non-empty. Zero-norm columns are skipped with a warning.
LassoFit lasso_linear(const MatrixXd& x, const VectorXd& y, double lambda,
                      const LassoOptions& opts = {}, const VectorXd& warm = {});

// Largest |x_j'(KKT gradient at zero)|: the smallest lambda with beta = 0.
double lasso_lambda_max(const MatrixXd& x, const VectorXd& y, Family family);

// Objective of lasso_linear.
double lasso_objective(const MatrixXd& x, const VectorXd& y, const VectorXd& beta,
                       double lambda);

struct LogisticLassoOptions {
  int max_iter = 5000;
  double tol = 1e-10;           // relative objective change
  double divergence_norm = 1e6;  // ||beta|| beyond this counts as divergence
  bool unpenalized_first = false;  // coordinate 0 is an intercept
};

// Proximal gradient with backtracking on
// (1/n) sum_i [log(1 + e^{x_i'beta}) - y_i x_i'beta] + lambda ||beta||_1.
// Each accepted step does not increase the objective.
LassoFit logistic_lasso(const MatrixXd& x, const VectorXd& y, double lambda,
                        const LogisticLassoOptions& opts = {}, const VectorXd& warm = {});

double logistic_lasso_objective(const MatrixXd& x, const VectorXd& y, const VectorXd& beta,
                                double lambda);

// Mean squared residual of beta, floored at kSigma2Floor.
double init_sigma2_from_residuals(const VectorXd& beta, const MatrixXd& x, const VectorXd& y);

struct Initialization {
  LassoFit lasso;      // on the caller's scale
  ParamState state;    // theta = eta = lasso.beta, gamma = 0
  double cv_lambda = 0.0;
};

struct InitOptions {
  int folds = 5;
  int grid_count = 20;
  std::uint64_t seed = 0;
  bool intercept = false;
};

// Lasso (gaussian) or l1-logistic (binomial) with lambda from k-fold CV over a
// log grid. Columns are rescaled to unit mean square internally (and centered
// too when an intercept is fitted); the returned beta is on the input scale.
// With an intercept, beta[0] is the intercept.
Initialization initialize(const Dataset& data, const InitOptions& opts);

}  // namespace mmdglm

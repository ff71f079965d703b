#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "mmdglm/problem.hpp"
#include "mmdglm/types.hpp"

namespace mmdglm {

struct AdmmConfig {
  double rho = 1.0;
  double learning_rate = 0.1;
  int inner_max_iter = 500;
  double inner_tol = 1e-4;
  int outer_max_iter = 200;
  double outer_tol = 1e-3;  // used for both primal and dual residuals
  double adagrad_epsilon = 1e-8;
  bool reset_accumulator = true;  // fresh AdaGrad accumulator for every theta-step

  void validate() const;
};

struct ParamState {
  VectorXd theta;
  VectorXd eta;    // sparse copy of theta
  VectorXd gamma;  // Lagrange multipliers of theta = eta
  std::optional<double> sigma2;  // gaussian family only

  static ParamState from_theta(const VectorXd& theta, std::optional<double> sigma2);
};

// The reported estimate is state.eta: it is exactly sparse, theta is not.
struct FitResult {
  ParamState state;
  double lambda = 0.0;
  int outer_iters = 0;
  int inner_iters = 0;  // summed over outer iterations
  bool converged = false;
  std::vector<double> primal_residuals;
  std::vector<double> dual_residuals;
  std::vector<double> objective_trace;  // lambda ||eta||_1 + loss(theta)

  const VectorXd& coefficients() const noexcept { return state.eta; }
};

double soft_threshold(double a, double b);
VectorXd soft_threshold(const VectorXd& a, double b);

// accumulator += grad^2; theta -= lr * grad / (sqrt(accumulator) + eps)
void adagrad_step(VectorXd& theta, const VectorXd& grad, VectorXd& accumulator, double lr,
                  double eps);

using GradientFn = std::function<VectorXd(const VectorXd&)>;

struct InnerResult {
  VectorXd theta;
  int iterations = 0;
  bool converged = false;
};

// Minimizes loss(theta) + gamma'theta + (rho/2)||theta - eta||^2 with AdaGrad,
// starting from theta0 with a fresh accumulator. Stops when a step moves theta
// by at most inner_tol or after inner_max_iter steps.
InnerResult theta_step(const GradientFn& loss_grad, const VectorXd& theta0, const VectorXd& eta,
                       const VectorXd& gamma, const AdmmConfig& cfg);
// Same, continuing from (and updating) a caller-owned accumulator.
InnerResult theta_step(const GradientFn& loss_grad, const VectorXd& theta0, const VectorXd& eta,
                       const VectorXd& gamma, const AdmmConfig& cfg, VectorXd& accumulator);

// Called after every outer iteration with the states before and after it.
using AdmmObserver =
    std::function<void(int iteration, const ParamState& before, const ParamState& after)>;

// ADMM for loss(theta) + lambda ||eta||_1 subject to theta = eta.
// Per outer iteration: eta-step (soft threshold), theta-step (AdaGrad),
// sigma2-step (gaussian), dual step. Deterministic in its inputs.
FitResult admm_fit(const MmdProblem& problem, double lambda, const AdmmConfig& cfg,
                   const ParamState& init, const AdmmObserver& observer = {});

}  // namespace mmdglm

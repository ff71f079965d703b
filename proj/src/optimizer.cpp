#include "mmdglm/optimizer.hpp"

#include <cmath>
#include <string>

#include "mmdglm/errors.hpp"

namespace mmdglm {

void AdmmConfig::validate() const {
  if (!(rho > 0.0) || !(learning_rate > 0.0) || !(inner_tol > 0.0) || !(outer_tol > 0.0) ||
      !(adagrad_epsilon > 0.0)) {
    throw ParameterDomainError("ADMM constants must be strictly positive");
  }
  if (inner_max_iter < 1 || outer_max_iter < 1) {
    throw ParameterDomainError("ADMM iteration caps must be at least 1");
  }
}

ParamState ParamState::from_theta(const VectorXd& theta, std::optional<double> sigma2) {
  return ParamState{theta, theta, VectorXd::Zero(theta.size()), sigma2};
}

double soft_threshold(double a, double b) {
  if (a > b) return a - b;
  if (a < -b) return a + b;
  return 0.0;
}

VectorXd soft_threshold(const VectorXd& a, double b) {
  return a.unaryExpr([b](double v) { return soft_threshold(v, b); });
}

void adagrad_step(VectorXd& theta, const VectorXd& grad, VectorXd& accumulator, double lr,
                  double eps) {
  accumulator.array() += grad.array().square();
  theta.array() -= lr * grad.array() / (accumulator.array().sqrt() + eps);
}

InnerResult theta_step(const GradientFn& loss_grad, const VectorXd& theta0, const VectorXd& eta,
                       const VectorXd& gamma, const AdmmConfig& cfg) {
  VectorXd accumulator = VectorXd::Zero(theta0.size());
  return theta_step(loss_grad, theta0, eta, gamma, cfg, accumulator);
}

InnerResult theta_step(const GradientFn& loss_grad, const VectorXd& theta0, const VectorXd& eta,
                       const VectorXd& gamma, const AdmmConfig& cfg, VectorXd& accumulator) {
  if (accumulator.size() != theta0.size()) throw ContractViolation("accumulator length mismatch");
  InnerResult out{theta0, 0, false};
  VectorXd previous(theta0.size());
  for (int t = 0; t < cfg.inner_max_iter; ++t) {
    const VectorXd grad = loss_grad(out.theta) + gamma + cfg.rho * (out.theta - eta);
    if (!grad.allFinite()) {
      throw SolverDivergenceError("non-finite gradient in theta-step at inner iteration " +
                                      std::to_string(t),
                                  out.theta);
    }
    previous = out.theta;
    adagrad_step(out.theta, grad, accumulator, cfg.learning_rate, cfg.adagrad_epsilon);
    out.iterations = t + 1;
    if ((out.theta - previous).norm() <= cfg.inner_tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

namespace {

double penalty(const MmdProblem& problem, const VectorXd& eta) {
  double total = 0.0;
  for (Index j = 0; j < eta.size(); ++j) {
    if (problem.penalized(j)) total += std::abs(eta[j]);
  }
  return total;
}

}  // namespace

FitResult admm_fit(const MmdProblem& problem, double lambda, const AdmmConfig& cfg,
                   const ParamState& init, const AdmmObserver& observer) {
  cfg.validate();
  if (!(lambda >= 0.0)) throw ParameterDomainError("lambda must be nonnegative");
  const Index p = problem.dim();
  if (init.theta.size() != p || init.eta.size() != p || init.gamma.size() != p) {
    throw ContractViolation("initial state has dimension " + std::to_string(init.theta.size()) +
                            ", problem has " + std::to_string(p));
  }
  const bool gaussian = problem.family() == Family::gaussian;
  if (gaussian && !init.sigma2) throw ContractViolation("gaussian fit needs an initial sigma2");

  FitResult result;
  result.lambda = lambda;
  result.state = init;
  ParamState& s = result.state;
  const double threshold = lambda / cfg.rho;
  VectorXd accumulator = VectorXd::Zero(p);

  for (int k = 0; k < cfg.outer_max_iter; ++k) {
    const ParamState before = observer ? s : ParamState{};
    const VectorXd eta_prev = s.eta;

    // eta-step
    const VectorXd shifted = s.theta + s.gamma / cfg.rho;
    for (Index j = 0; j < p; ++j) {
      s.eta[j] = problem.penalized(j) ? soft_threshold(shifted[j], threshold) : shifted[j];
    }

    // theta-step; sigma2 stays fixed for the inner loop
    const double sigma2 = gaussian ? *s.sigma2 : 1.0;
    if (cfg.reset_accumulator) accumulator.setZero();
    const InnerResult inner = theta_step(
        [&](const VectorXd& theta) { return problem.gradient(theta, sigma2); }, s.theta, s.eta,
        s.gamma, cfg, accumulator);
    s.theta = inner.theta;
    result.inner_iters += inner.iterations;

    // sigma2-step
    if (gaussian) s.sigma2 = problem.update_sigma2(s.theta);

    // dual step
    const VectorXd gap = s.theta - s.eta;
    s.gamma += cfg.rho * gap;

    const double objective = lambda * penalty(problem, s.eta) +
                             problem.loss(s.theta, gaussian ? *s.sigma2 : 1.0);
    if (!std::isfinite(objective)) {
      throw SolverDivergenceError("non-finite objective at outer iteration " + std::to_string(k),
                                  s.theta);
    }
    const double primal = gap.norm();
    const double dual = cfg.rho * (s.eta - eta_prev).norm();
    result.primal_residuals.push_back(primal);
    result.dual_residuals.push_back(dual);
    result.objective_trace.push_back(objective);
    result.outer_iters = k + 1;
    if (observer) observer(k, before, s);
    if (primal <= cfg.outer_tol && dual <= cfg.outer_tol) {
      result.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace mmdglm

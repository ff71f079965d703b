#include "mmdglm/init_lasso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mmdglm/errors.hpp"
#include "mmdglm/gaussian_mmd.hpp"
#include "mmdglm/logistic_mmd.hpp"
#include "mmdglm/model_selection.hpp"

namespace mmdglm {

namespace {

double kkt_violation(const VectorXd& grad, const VectorXd& beta, double lambda,
                     const VectorXd& col_sq) {
  double worst = 0.0;
  for (Index j = 0; j < beta.size(); ++j) {
    if (col_sq[j] == 0.0) continue;
    const double v = beta[j] != 0.0 ? std::abs(grad[j] - lambda * (beta[j] > 0 ? 1.0 : -1.0))
                                    : std::max(0.0, std::abs(grad[j]) - lambda);
    worst = std::max(worst, v);
  }
  return worst;
}

double log1p_exp(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double logistic_nll(const MatrixXd& x, const VectorXd& y, const VectorXd& beta) {
  const VectorXd z = x * beta;
  double total = 0.0;
  for (Index i = 0; i < z.size(); ++i) total += log1p_exp(z[i]) - y[i] * z[i];
  return total / static_cast<double>(x.rows());
}

VectorXd logistic_grad(const MatrixXd& x, const VectorXd& y, const VectorXd& beta) {
  const VectorXd z = x * beta;
  VectorXd w(z.size());
  for (Index i = 0; i < z.size(); ++i) w[i] = sigmoid(z[i]) - y[i];
  return x.transpose() * w / static_cast<double>(x.rows());
}

double l1(const VectorXd& beta, bool skip_first) {
  double total = beta.cwiseAbs().sum();
  if (skip_first && beta.size() > 0) total -= std::abs(beta[0]);
  return total;
}

}  // namespace

LassoFit lasso_linear(const MatrixXd& x, const VectorXd& y, double lambda,
                      const LassoOptions& opts, const VectorXd& warm) {
  if (!(lambda >= 0.0)) throw ParameterDomainError("lambda must be nonnegative");
  const Index n = x.rows();
  const Index p = x.cols();
  if (n == 0) throw ContractViolation("lasso_linear: empty design");
  if (y.size() != n) throw ContractViolation("lasso_linear: y length does not match X rows");
  const double nd = static_cast<double>(n);

  LassoFit fit;
  fit.lambda = lambda;
  fit.beta = warm.size() == p ? warm : VectorXd::Zero(p);
  const VectorXd col_sq = x.colwise().squaredNorm().transpose() / nd;
  for (Index j = 0; j < p; ++j) {
    if (col_sq[j] == 0.0) {
      fit.beta[j] = 0.0;
      fit.warnings.push_back("column " + std::to_string(j + 1) +
                             " has zero variance; coordinate skipped");
    }
  }

  VectorXd r = y - x * fit.beta;
  for (int it = 0; it < opts.max_iter; ++it) {
    for (Index j = 0; j < p; ++j) {
      if (col_sq[j] == 0.0) continue;
      const double old = fit.beta[j];
      const double rho = x.col(j).dot(r) / nd + col_sq[j] * old;
      const double updated = soft_threshold(rho, lambda) / col_sq[j];
      if (updated != old) {
        r -= (updated - old) * x.col(j);
        fit.beta[j] = updated;
      }
    }
    fit.iterations = it + 1;
    // Refresh the residual now and then to stop drift.
    if (it % 50 == 49) r = y - x * fit.beta;
    const VectorXd grad = x.transpose() * r / nd;
    if (kkt_violation(grad, fit.beta, lambda, col_sq) <= opts.kkt_tol) {
      fit.converged = true;
      break;
    }
  }
  return fit;
}

double lasso_objective(const MatrixXd& x, const VectorXd& y, const VectorXd& beta,
                       double lambda) {
  return (y - x * beta).squaredNorm() / (2.0 * static_cast<double>(x.rows())) +
         lambda * beta.cwiseAbs().sum();
}

double lasso_lambda_max(const MatrixXd& x, const VectorXd& y, Family family) {
  const double nd = static_cast<double>(x.rows());
  if (family == Family::gaussian) return (x.transpose() * y).cwiseAbs().maxCoeff() / nd;
  const VectorXd centered = y.array() - 0.5;
  return (x.transpose() * centered).cwiseAbs().maxCoeff() / nd;
}

double logistic_lasso_objective(const MatrixXd& x, const VectorXd& y, const VectorXd& beta,
                                double lambda) {
  return logistic_nll(x, y, beta) + lambda * beta.cwiseAbs().sum();
}

LassoFit logistic_lasso(const MatrixXd& x, const VectorXd& y, double lambda,
                        const LogisticLassoOptions& opts, const VectorXd& warm) {
  if (!(lambda >= 0.0)) throw ParameterDomainError("lambda must be nonnegative");
  const Index n = x.rows();
  const Index p = x.cols();
  if (n == 0) throw ContractViolation("logistic_lasso: empty design");
  if (y.size() != n) throw ContractViolation("logistic_lasso: y length does not match X rows");
  if (lambda == 0.0 && (y.array() == 1.0).count() * (y.array() == 0.0).count() == 0) {
    throw ContractViolation("logistic_lasso: both classes must be present when lambda = 0");
  }

  LassoFit fit;
  fit.lambda = lambda;
  fit.beta = warm.size() == p ? warm : VectorXd::Zero(p);

  auto prox = [&](const VectorXd& v, double step) {
    VectorXd out = soft_threshold(v, step * lambda);
    if (opts.unpenalized_first && p > 0) out[0] = v[0];
    return out;
  };
  auto penalty = [&](const VectorXd& b) { return lambda * l1(b, opts.unpenalized_first); };

  // Lipschitz bound of the smooth part: ||X||_F^2 / (4n) >= ||X||_2^2 / (4n).
  const double lipschitz = std::max(x.squaredNorm() / (4.0 * static_cast<double>(n)), 1e-12);
  double step = 1.0 / lipschitz;

  double f = logistic_nll(x, y, fit.beta);
  double objective = f + penalty(fit.beta);
  for (int it = 0; it < opts.max_iter; ++it) {
    const VectorXd grad = logistic_grad(x, y, fit.beta);
    VectorXd candidate;
    double f_candidate = 0.0;
    step *= 2.0;
    for (int bt = 0; bt < 60; ++bt) {
      candidate = prox(fit.beta - step * grad, step);
      const VectorXd delta = candidate - fit.beta;
      f_candidate = logistic_nll(x, y, candidate);
      if (f_candidate <= f + grad.dot(delta) + delta.squaredNorm() / (2.0 * step) + 1e-15) break;
      step *= 0.5;
    }
    const double next = f_candidate + penalty(candidate);
    fit.iterations = it + 1;
    if (next > objective) {  // no further descent available at machine precision
      fit.converged = true;
      break;
    }
    const double change = objective - next;
    const double move = (candidate - fit.beta).norm();
    fit.beta = std::move(candidate);
    f = f_candidate;
    objective = next;
    if (fit.beta.norm() > opts.divergence_norm) break;
    if (change <= opts.tol * std::max(1.0, std::abs(objective)) && move <= 1e-8) {
      fit.converged = true;
      break;
    }
  }
  return fit;
}

double init_sigma2_from_residuals(const VectorXd& beta, const MatrixXd& x, const VectorXd& y) {
  if (x.rows() == 0) throw ContractViolation("empty design");
  const double mean_sq = (y - x * beta).squaredNorm() / static_cast<double>(x.rows());
  return std::max(mean_sq, kSigma2Floor);
}

namespace {

// Columns rescaled to unit mean square (about the mean when centering).
struct Standardized {
  MatrixXd x;
  VectorXd y;
  VectorXd center;  // zero unless centering
  VectorXd scale;
  double y_center = 0.0;
};

Standardized standardize(const Dataset& data, bool center_x, bool center_y) {
  Standardized s;
  const double nd = static_cast<double>(data.n());
  s.center = center_x ? VectorXd(data.x.colwise().mean().transpose()) : VectorXd::Zero(data.p());
  s.x = data.x.rowwise() - s.center.transpose();
  s.scale = (s.x.colwise().squaredNorm().transpose() / nd).cwiseSqrt();
  for (Index j = 0; j < s.scale.size(); ++j) {
    if (s.scale[j] > 0.0) s.x.col(j) /= s.scale[j];
    else s.scale[j] = 1.0;
  }
  s.y_center = center_y ? data.y.mean() : 0.0;
  s.y = data.y.array() - s.y_center;
  return s;
}

struct PathFitter {
  Family family;
  bool logistic_intercept;  // binomial with an intercept column at 0

  LassoFit operator()(const MatrixXd& x, const VectorXd& y, double lambda,
                      const VectorXd& warm) const {
    if (family == Family::gaussian) return lasso_linear(x, y, lambda, {}, warm);
    LogisticLassoOptions opts;
    opts.unpenalized_first = logistic_intercept;
    return logistic_lasso(x, y, lambda, opts, warm);
  }
};

double heldout_score(Family family, const MatrixXd& x, const VectorXd& y, const VectorXd& beta) {
  if (family == Family::gaussian) return (y - x * beta).squaredNorm() / static_cast<double>(x.rows());
  return logistic_nll(x, y, beta);
}

}  // namespace

Initialization initialize(const Dataset& data, const InitOptions& opts) {
  validate(data);
  const Index n = data.n();
  const Index p = data.p();
  const bool gaussian = data.family == Family::gaussian;
  const Standardized s = standardize(data, opts.intercept, opts.intercept && gaussian);

  // Working design: binomial intercepts ride along as an unpenalized column.
  MatrixXd xw = s.x;
  if (opts.intercept && !gaussian) {
    xw.resize(n, p + 1);
    xw.col(0).setOnes();
    xw.rightCols(p) = s.x;
  }
  const PathFitter fitter{data.family, opts.intercept && !gaussian};

  double lambda_max = lasso_lambda_max(s.x, s.y, data.family);
  if (!gaussian && opts.intercept) {
    const VectorXd centered = s.y.array() - s.y.mean();
    lambda_max = (s.x.transpose() * centered).cwiseAbs().maxCoeff() / static_cast<double>(n);
  }
  if (!(lambda_max > 0.0)) lambda_max = 1.0;
  const double ratio = n < p ? 1e-2 : 1e-4;
  const LambdaGrid grid = lambda_grid(static_cast<std::size_t>(std::max(opts.grid_count, 2)),
                                      lambda_max * ratio, lambda_max);

  std::size_t best = grid.count() - 1;
  const int folds = static_cast<int>(std::min<Index>(opts.folds, n));
  if (folds >= 2) {
    std::optional<VectorXd> labels;
    if (!gaussian) labels = data.y;
    const FoldPartition partition = kfold_split(n, folds, opts.seed, labels);
    std::vector<double> scores(grid.count(), 0.0);
    for (const auto& held : partition) {
      std::vector<bool> is_held(static_cast<std::size_t>(n), false);
      for (Index i : held) is_held[static_cast<std::size_t>(i)] = true;
      std::vector<Index> train;
      for (Index i = 0; i < n; ++i) {
        if (!is_held[static_cast<std::size_t>(i)]) train.push_back(i);
      }
      MatrixXd x_tr(static_cast<Index>(train.size()), xw.cols());
      VectorXd y_tr(static_cast<Index>(train.size()));
      for (std::size_t k = 0; k < train.size(); ++k) {
        x_tr.row(static_cast<Index>(k)) = xw.row(train[k]);
        y_tr[static_cast<Index>(k)] = s.y[train[k]];
      }
      MatrixXd x_te(static_cast<Index>(held.size()), xw.cols());
      VectorXd y_te(static_cast<Index>(held.size()));
      for (std::size_t k = 0; k < held.size(); ++k) {
        x_te.row(static_cast<Index>(k)) = xw.row(held[k]);
        y_te[static_cast<Index>(k)] = s.y[held[k]];
      }
      VectorXd warm;
      for (std::size_t g = 0; g < grid.count(); ++g) {
        const LassoFit f = fitter(x_tr, y_tr, grid.values[g], warm);
        warm = f.beta;
        scores[g] += heldout_score(data.family, x_te, y_te, f.beta);
      }
    }
    best = 0;
    for (std::size_t g = 1; g < grid.count(); ++g) {
      if (scores[g] < scores[best]) best = g;
    }
  }

  VectorXd warm;
  LassoFit fit;
  for (std::size_t g = 0; g <= best; ++g) {
    fit = fitter(xw, s.y, grid.values[g], warm);
    warm = fit.beta;
  }

  // Back to the caller's scale.
  const Index offset = opts.intercept && !gaussian ? 1 : 0;
  VectorXd beta = fit.beta.segment(offset, p).cwiseQuotient(s.scale);
  VectorXd out_beta;
  if (opts.intercept) {
    const double b0 = (gaussian ? s.y_center : fit.beta[0]) - s.center.dot(beta);
    out_beta.resize(p + 1);
    out_beta[0] = b0;
    out_beta.tail(p) = beta;
  } else {
    out_beta = beta;
  }

  Initialization init;
  init.cv_lambda = grid.values[best];
  init.lasso = fit;
  init.lasso.beta = out_beta;
  std::optional<double> sigma2;
  if (gaussian) {
    const Dataset design = with_intercept_column(data, opts.intercept);
    sigma2 = init_sigma2_from_residuals(out_beta, design.x, design.y);
  }
  init.state = ParamState::from_theta(out_beta, sigma2);
  return init;
}

}  // namespace mmdglm

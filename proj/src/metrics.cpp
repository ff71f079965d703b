#include "mmdglm/metrics.hpp"

#include "mmdglm/errors.hpp"
#include "mmdglm/logistic_mmd.hpp"

namespace mmdglm {

namespace {

void require_same_length(const VectorXd& a, const VectorXd& b) {
  if (a.size() != b.size()) {
    throw ContractViolation("coefficient vectors differ in length (" + std::to_string(a.size()) +
                            " vs " + std::to_string(b.size()) + ")");
  }
}

void require_test_shape(const VectorXd& beta, const MatrixXd& x, const VectorXd& y) {
  if (x.cols() != beta.size()) throw ContractViolation("test design width does not match beta");
  if (x.rows() != y.size()) throw ContractViolation("test design and response differ in length");
  if (x.rows() == 0) throw ContractViolation("test set is empty");
}

}  // namespace

double estimation_error(const VectorXd& beta_hat, const VectorXd& beta_true, ErrorNorm norm) {
  require_same_length(beta_hat, beta_true);
  const double sq = (beta_hat - beta_true).squaredNorm();
  switch (norm) {
    case ErrorNorm::mean_squared: return beta_true.size() == 0 ? 0.0 : sq / static_cast<double>(beta_true.size());
    case ErrorNorm::l2: return std::sqrt(sq);
    case ErrorNorm::squared: return sq;
  }
  return sq;
}

SelectionLoss selection_loss(const VectorXd& beta_hat, const VectorXd& beta_true) {
  require_same_length(beta_hat, beta_true);
  SelectionLoss out;
  for (Index j = 0; j < beta_true.size(); ++j) {
    const bool selected = beta_hat[j] != 0.0;
    const bool active = beta_true[j] != 0.0;
    if (selected && !active) ++out.fp;
    if (!selected && active) ++out.fn;
  }
  out.fsl = out.fp + out.fn;
  return out;
}

double prediction_error(const VectorXd& beta_hat, const MatrixXd& x_test, const VectorXd& y_test) {
  require_test_shape(beta_hat, x_test, y_test);
  return (y_test - x_test * beta_hat).squaredNorm() / static_cast<double>(y_test.size());
}

double misclassification_error(const VectorXd& beta_hat, const MatrixXd& x_test,
                               const VectorXd& y_test) {
  require_test_shape(beta_hat, x_test, y_test);
  const VectorXd eta = x_test * beta_hat;
  Index wrong = 0;
  for (Index i = 0; i < eta.size(); ++i) {
    const double predicted = sigmoid(eta[i]) > 0.5 ? 1.0 : 0.0;
    if (predicted != y_test[i]) ++wrong;
  }
  return 100.0 * static_cast<double>(wrong) / static_cast<double>(eta.size());
}

EvalReport evaluate(const VectorXd& beta_hat, const VectorXd& beta_true, const Dataset& test) {
  EvalReport report;
  report.mse = estimation_error(beta_hat, beta_true);
  const SelectionLoss sl = selection_loss(beta_hat, beta_true);
  report.fp = sl.fp;
  report.fn = sl.fn;
  report.fsl = sl.fsl;
  if (test.n() > 0) {
    if (test.family == Family::gaussian) {
      report.pe = prediction_error(beta_hat, test.x, test.y);
    } else {
      report.me_percent = misclassification_error(beta_hat, test.x, test.y);
    }
  }
  return report;
}

}  // namespace mmdglm

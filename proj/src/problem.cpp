#include "mmdglm/problem.hpp"

#include "mmdglm/errors.hpp"
#include "mmdglm/gaussian_mmd.hpp"
#include "mmdglm/logistic_mmd.hpp"

namespace mmdglm {

Dataset with_intercept_column(const Dataset& data, bool intercept) {
  if (!intercept) return data;
  Dataset out;
  out.family = data.family;
  out.y = data.y;
  out.x.resize(data.n(), data.p() + 1);
  out.x.col(0).setOnes();
  out.x.rightCols(data.p()) = data.x;
  return out;
}

MmdProblem::MmdProblem(Dataset data, Variant variant, Bandwidths bw, bool intercept)
    : variant_(variant), bw_(bw), intercept_(intercept) {
  validate(data);
  bw_.validate();
  if (data.family == Family::binomial && !(bw_.h_y < 1.0)) {
    throw ParameterDomainError("binomial h_y must lie in (0, 1)");
  }
  if (variant_ == Variant::full) gram_ = gram_matrix(data.x, bw_.h_x);
  design_ = with_intercept_column(data, intercept_);
}

double MmdProblem::loss(const VectorXd& theta, double sigma2) const {
  if (family() == Family::gaussian) {
    if (variant_ == Variant::full) {
      return objective_full_gaussian(theta, design_, sigma2, bw_.h_y, gram_);
    }
    return objective_gaussian(Variant::local, theta, design_, sigma2, bw_);
  }
  if (variant_ == Variant::full) return objective_full_logistic(theta, design_, bw_.h_y, gram_);
  return objective_logistic(Variant::local, theta, design_, bw_);
}

VectorXd MmdProblem::gradient(const VectorXd& theta, double sigma2) const {
  if (family() == Family::gaussian) {
    if (variant_ == Variant::full) {
      return grad_pairwise_gaussian(theta, design_, sigma2, bw_.h_y, gram_);
    }
    return grad_local_gaussian(theta, design_, sigma2, bw_.h_y);
  }
  if (variant_ == Variant::full) return grad_pairwise_logistic(theta, design_, bw_.h_y, gram_);
  return grad_local_logistic(theta, design_, bw_.h_y);
}

double MmdProblem::local_loss_on(const Dataset& other, const VectorXd& theta,
                                 double sigma2) const {
  const Dataset held = with_intercept_column(other, intercept_);
  if (family() == Family::gaussian) {
    return objective_gaussian(Variant::local, theta, held, sigma2, bw_);
  }
  return objective_logistic(Variant::local, theta, held, bw_);
}

double MmdProblem::update_sigma2(const VectorXd& theta) const {
  return mmdglm::update_sigma2(theta, design_);
}

}  // namespace mmdglm

#pragma once

#include <optional>

#include "mmdglm/kernels.hpp"
#include "mmdglm/types.hpp"

namespace mmdglm {

// A dataset bound to a family, variant and bandwidths: everything the ADMM
// solver needs to evaluate the data-fit term and its gradient.
//
// With `intercept`, a column of ones is prepended to the design and
// coordinate 0 of theta is the (unpenalized) intercept. The input kernel is
// always evaluated on the original predictors.
class MmdProblem {
 public:
  MmdProblem(Dataset data, Variant variant, Bandwidths bw, bool intercept = false);

  Family family() const noexcept { return design_.family; }
  Variant variant() const noexcept { return variant_; }
  const Bandwidths& bandwidths() const noexcept { return bw_; }
  bool intercept() const noexcept { return intercept_; }

  // Dimension of theta (p, or p + 1 with an intercept).
  Index dim() const noexcept { return design_.x.cols(); }
  Index n() const noexcept { return design_.x.rows(); }

  // Dataset as seen by the losses (intercept column included).
  const Dataset& design() const noexcept { return design_; }

  // sigma2 is ignored for the binomial family.
  double loss(const VectorXd& theta, double sigma2) const;
  VectorXd gradient(const VectorXd& theta, double sigma2) const;

  // Held-out O(n) loss of theta on `other` (raw predictors, no intercept
  // column), used for cross-validation scoring.
  double local_loss_on(const Dataset& other, const VectorXd& theta, double sigma2) const;

  double update_sigma2(const VectorXd& theta) const;

  // True when coordinate j carries the l1 penalty.
  bool penalized(Index j) const noexcept { return !(intercept_ && j == 0); }

 private:
  Dataset design_;
  Variant variant_;
  Bandwidths bw_;
  bool intercept_;
  MatrixXd gram_;  // empty for the local variant
};

// Prepends a ones column when `intercept` is set.
Dataset with_intercept_column(const Dataset& data, bool intercept);

}  // namespace mmdglm

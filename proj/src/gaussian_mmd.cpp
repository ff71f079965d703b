#include "mmdglm/gaussian_mmd.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mmdglm/errors.hpp"
#include "mmdglm/parallel.hpp"

namespace mmdglm {

namespace detail {

double clamped_exp(double arg) { return std::exp(std::max(arg, kMinExponent)); }

}  // namespace detail

namespace {

using detail::clamped_exp;

void check_scales(double sigma2, double h_y) {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    throw ParameterDomainError("sigma2 must be positive, got " + std::to_string(sigma2));
  }
  if (!(h_y > 0.0) || !std::isfinite(h_y)) {
    throw ParameterDomainError("h_y must be positive, got " + std::to_string(h_y));
  }
}

void check_gaussian(const Dataset& data, const VectorXd& theta) {
  if (data.family != Family::gaussian) throw ContractViolation("expected a gaussian dataset");
  if (data.n() == 0) throw ContractViolation("empty dataset");
  if (theta.size() != data.p()) {
    throw ContractViolation("theta has length " + std::to_string(theta.size()) + ", expected " +
                            std::to_string(data.p()));
  }
}

// Constants shared by both losses.
//   s1 = sigma2 + h^2, s2 = 2 sigma2 + h^2
//   l~ = A - B exp(-r^2 / (2 s1)),  A = h / sqrt(s2), B = 2h / sqrt(s1)
struct Scales {
  double s1, s2, a, b;
  double a3, b3;  // h / s2^{3/2}, 2h / s1^{3/2}

  Scales(double sigma2, double h_y)
      : s1(sigma2 + h_y * h_y),
        s2(2.0 * sigma2 + h_y * h_y),
        a(h_y / std::sqrt(s2)),
        b(2.0 * h_y / std::sqrt(s1)),
        a3(h_y / (s2 * std::sqrt(s2))),
        b3(2.0 * h_y / (s1 * std::sqrt(s1))) {}
};

}  // namespace

void GaussianLossParams::validate() const {
  check_scales(sigma2, h_y);
  if (!theta.allFinite()) throw NumericInputError("theta has non-finite entries");
}

double expected_gaussian_kernel(double mu, double sigma2, double y0, double h_y) {
  check_scales(sigma2, h_y);
  const double s = sigma2 + h_y * h_y;
  const double r = y0 - mu;
  return h_y / std::sqrt(s) * clamped_exp(-r * r / (2.0 * s));
}

double local_loss_gaussian(const GaussianLossParams& params, const VectorXd& x_i, double y_i) {
  params.validate();
  if (x_i.size() != params.theta.size()) throw ContractViolation("x_i and theta differ in length");
  const Scales sc(params.sigma2, params.h_y);
  const double r = y_i - x_i.dot(params.theta);
  return sc.a - sc.b * clamped_exp(-r * r / (2.0 * sc.s1));
}

double pairwise_loss_gaussian(const GaussianLossParams& params, const VectorXd& x_i,
                              const VectorXd& x_j, double y_i) {
  params.validate();
  if (x_i.size() != params.theta.size() || x_j.size() != params.theta.size()) {
    throw ContractViolation("x_i, x_j and theta differ in length");
  }
  const Scales sc(params.sigma2, params.h_y);
  const double d = (x_j - x_i).dot(params.theta);
  const double r = y_i - x_j.dot(params.theta);
  return sc.a * clamped_exp(-d * d / (2.0 * sc.s2)) - sc.b * clamped_exp(-r * r / (2.0 * sc.s1));
}

double objective_gaussian(Variant variant, const VectorXd& theta, const Dataset& data,
                          double sigma2, const Bandwidths& bw) {
  check_gaussian(data, theta);
  check_scales(sigma2, bw.h_y);
  if (variant == Variant::full) {
    bw.validate();
    return objective_full_gaussian(theta, data, sigma2, bw.h_y, gram_matrix(data.x, bw.h_x));
  }
  const Scales sc(sigma2, bw.h_y);
  const VectorXd r = data.y - data.x * theta;
  double total = 0.0;
  for (Index i = 0; i < r.size(); ++i) {
    total += sc.a - sc.b * clamped_exp(-r[i] * r[i] / (2.0 * sc.s1));
  }
  return total / static_cast<double>(data.n());
}

double objective_full_gaussian(const VectorXd& theta, const Dataset& data, double sigma2,
                               double h_y, const MatrixXd& gram) {
  check_gaussian(data, theta);
  check_scales(sigma2, h_y);
  const Index n = data.n();
  if (gram.rows() != n || gram.cols() != n) throw ContractViolation("gram matrix is not n x n");
  const Scales sc(sigma2, h_y);
  const VectorXd z = data.x * theta;
  VectorXd partial(n);
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) {
    double acc = 0.0;
    for (Index j = 0; j < n; ++j) {
      const double d = z[j] - z[i];
      const double r = data.y[i] - z[j];
      acc += gram(i, j) * (sc.a * clamped_exp(-d * d / (2.0 * sc.s2)) -
                           sc.b * clamped_exp(-r * r / (2.0 * sc.s1)));
    }
    partial[i] = acc;
  }
  const double nn = static_cast<double>(n);
  return parallel::ordered_sum(partial) / (nn * nn);
}

VectorXd grad_local_gaussian(const VectorXd& theta, const Dataset& data, double sigma2,
                             double h_y) {
  check_gaussian(data, theta);
  check_scales(sigma2, h_y);
  const Scales sc(sigma2, h_y);
  const VectorXd r = data.y - data.x * theta;
  VectorXd w(r.size());
  for (Index i = 0; i < r.size(); ++i) {
    w[i] = -sc.b3 * r[i] * clamped_exp(-r[i] * r[i] / (2.0 * sc.s1));
  }
  return data.x.transpose() * w / static_cast<double>(data.n());
}

VectorXd grad_pairwise_gaussian(const VectorXd& theta, const Dataset& data, double sigma2,
                                const Bandwidths& bw) {
  bw.validate();
  return grad_pairwise_gaussian(theta, data, sigma2, bw.h_y, gram_matrix(data.x, bw.h_x));
}

VectorXd grad_pairwise_gaussian(const VectorXd& theta, const Dataset& data, double sigma2,
                                double h_y, const MatrixXd& gram) {
  check_gaussian(data, theta);
  check_scales(sigma2, h_y);
  const Index n = data.n();
  if (gram.rows() != n || gram.cols() != n) throw ContractViolation("gram matrix is not n x n");
  const Scales sc(sigma2, h_y);
  const VectorXd z = data.x * theta;
  // Pair (i, j) contributes c_ij (x_j - x_i) + d_ij x_j. With K symmetric,
  // c is antisymmetric, so x_k collects 2 sum_m c_mk + sum_m d_mk.
  VectorXd w(n);
#pragma omp parallel for schedule(static)
  for (Index k = 0; k < n; ++k) {
    double acc = 0.0;
    for (Index m = 0; m < n; ++m) {
      const double d = z[k] - z[m];
      const double r = data.y[m] - z[k];
      acc += gram(m, k) * (-2.0 * sc.a3 * d * clamped_exp(-d * d / (2.0 * sc.s2)) -
                           sc.b3 * r * clamped_exp(-r * r / (2.0 * sc.s1)));
    }
    w[k] = acc;
  }
  const double nn = static_cast<double>(n);
  return data.x.transpose() * w / (nn * nn);
}

bool local_convexity_check_gaussian(const VectorXd& theta, const VectorXd& x_i, double y_i,
                                    double sigma2, double h_y) {
  check_scales(sigma2, h_y);
  if (x_i.size() != theta.size()) throw ContractViolation("x_i and theta differ in length");
  const double r = y_i - x_i.dot(theta);
  return r * r <= sigma2 + h_y * h_y;
}

double update_sigma2(const VectorXd& theta, const Dataset& data) {
  if (data.n() == 0) throw ContractViolation("empty dataset");
  if (theta.size() != data.p()) throw ContractViolation("theta length does not match data");
  const double mean_sq = (data.y - data.x * theta).squaredNorm() / static_cast<double>(data.n());
  return std::max(mean_sq, kSigma2Floor);
}

}  // namespace mmdglm

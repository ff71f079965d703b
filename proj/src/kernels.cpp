#include "mmdglm/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "mmdglm/errors.hpp"

namespace mmdglm {

void Bandwidths::validate() const {
  if (!(h_x > 0.0) || !std::isfinite(h_x)) {
    throw ParameterDomainError("h_x must be positive, got " + std::to_string(h_x));
  }
  if (!(h_y > 0.0) || !std::isfinite(h_y)) {
    throw ParameterDomainError("h_y must be positive, got " + std::to_string(h_y));
  }
}

double gaussian_kernel_x(const VectorXd& u, const VectorXd& v, double h_x) {
  if (u.size() != v.size()) {
    throw ContractViolation("gaussian_kernel_x: length " + std::to_string(u.size()) + " vs " +
                            std::to_string(v.size()));
  }
  if (!u.allFinite() || !v.allFinite() || !std::isfinite(h_x)) {
    throw NumericInputError("gaussian_kernel_x: non-finite input");
  }
  if (!(h_x > 0.0)) throw ParameterDomainError("gaussian_kernel_x: h_x must be positive");
  return std::exp(-(u - v).squaredNorm() / (2.0 * h_x * h_x));
}

double geometric_kernel_y(int y1, int y2, double h_y) {
  if (!(h_y > 0.0 && h_y < 1.0)) {
    throw ParameterDomainError("geometric kernel needs 0 < h_y < 1, got " + std::to_string(h_y));
  }
  if ((y1 != 0 && y1 != 1) || (y2 != 0 && y2 != 1)) {
    throw ContractViolation("geometric kernel is defined on {0, 1}");
  }
  return y1 == y2 ? 0.5 * h_y : 0.5 * h_y * (1.0 - h_y);
}

namespace {

double median_in_place(std::vector<double>& values) {
  const std::size_t m = values.size();
  const std::size_t mid = m / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid),
                   values.end());
  const double upper = values[mid];
  if (m % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(),
                                         values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

double checked_median(std::vector<double>& distances) {
  if (distances.empty()) throw ContractViolation("median heuristic needs at least 2 points");
  if (*std::max_element(distances.begin(), distances.end()) == 0.0) {
    throw DegenerateBandwidthError(
        "all points are identical; supply the bandwidth explicitly");
  }
  const double med = median_in_place(distances);
  if (med > 0.0) return med;
  // More than half of the pairs coincide. Fall back to the median of the
  // nonzero distances so the bandwidth stays positive.
  std::erase(distances, 0.0);
  return median_in_place(distances);
}

}  // namespace

double median_heuristic(const MatrixXd& points) {
  const Index n = points.rows();
  if (!points.allFinite()) throw NumericInputError("median_heuristic: non-finite input");
  std::vector<double> distances;
  if (n >= 2) distances.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      distances.push_back((points.row(i) - points.row(j)).norm());
    }
  }
  return checked_median(distances);
}

double median_heuristic(std::span<const double> scalars) {
  const std::size_t n = scalars.size();
  std::vector<double> distances;
  if (n >= 2) distances.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(scalars[i])) throw NumericInputError("median_heuristic: non-finite input");
    for (std::size_t j = i + 1; j < n; ++j) distances.push_back(std::abs(scalars[i] - scalars[j]));
  }
  return checked_median(distances);
}

Bandwidths default_bandwidths(const Dataset& data) {
  Bandwidths bw;
  bw.h_x = median_heuristic(data.x);
  if (data.family == Family::binomial) {
    bw.h_y = kBinaryResponseBandwidth;
  } else {
    bw.h_y = median_heuristic(std::span<const double>(data.y.data(),
                                                      static_cast<std::size_t>(data.y.size())));
  }
  return bw;
}

MatrixXd gram_matrix(const MatrixXd& x, double h_x) {
  if (!(h_x > 0.0)) throw ParameterDomainError("gram_matrix: h_x must be positive");
  const Index n = x.rows();
  const double scale = 1.0 / (2.0 * h_x * h_x);
  MatrixXd gram(n, n);
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      gram(i, j) = i == j ? 1.0 : std::exp(-(x.row(i) - x.row(j)).squaredNorm() * scale);
    }
  }
  return gram;
}

}  // namespace mmdglm

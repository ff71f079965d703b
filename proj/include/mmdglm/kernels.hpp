#pragma once

#include <span>

#include "mmdglm/types.hpp"

namespace mmdglm {

// Kernel scales. h_x for the Gaussian input kernel, h_y for the response
// kernel (Gaussian scale for continuous y, geometric parameter in (0,1) for
// binary y).
struct Bandwidths {
  double h_x = 1.0;
  double h_y = 1.0;

  void validate() const;
};

inline constexpr double kBinaryResponseBandwidth = 0.70710678118654752440;  // sqrt(2)/2

// exp(-||u - v||^2 / (2 h_x^2))
double gaussian_kernel_x(const VectorXd& u, const VectorXd& v, double h_x);

// 0.5 h_y (1 - h_y)^{|y1 - y2|} for y1, y2 in {0, 1}
double geometric_kernel_y(int y1, int y2, double h_y);

// Median of all pairwise Euclidean distances between rows of `points`. Even
// pair counts take the mean of the two central order statistics.
double median_heuristic(const MatrixXd& points);
double median_heuristic(std::span<const double> scalars);

// Median heuristic on the rows of x and (for gaussian) on y; binary responses
// get the fixed sqrt(2)/2.
Bandwidths default_bandwidths(const Dataset& data);

// n x n matrix of gaussian_kernel_x over the rows of x. Rows are filled in
// parallel; every entry is computed independently so the result does not
// depend on the thread count.
MatrixXd gram_matrix(const MatrixXd& x, double h_x);

}  // namespace mmdglm

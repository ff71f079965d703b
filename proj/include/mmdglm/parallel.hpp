#pragma once

#include <vector>

#include <Eigen/Dense>

namespace mmdglm::parallel {

// Threads used by the OpenMP kernels in the calling thread. Wraps
// omp_get_max_threads so headers stay free of <omp.h>.
int max_threads();
void set_threads(int threads);

// Sums values[0..n) left to right. Kernels write one partial per row and
// reduce here, so floating-point order is fixed regardless of scheduling.
double ordered_sum(const Eigen::VectorXd& partials);

}  // namespace mmdglm::parallel

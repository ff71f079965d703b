#include "mmdglm/parallel.hpp"

#include <omp.h>

namespace mmdglm::parallel {

int max_threads() { return omp_get_max_threads(); }

void set_threads(int threads) { omp_set_num_threads(threads < 1 ? 1 : threads); }

double ordered_sum(const Eigen::VectorXd& partials) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < partials.size(); ++i) total += partials[i];
  return total;
}

}  // namespace mmdglm::parallel

#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "mmdglm/init_lasso.hpp"
#include "mmdglm/optimizer.hpp"
#include "mmdglm/problem.hpp"
#include "mmdglm/types.hpp"

namespace mmdglm {

struct LambdaGrid {
  std::vector<double> values;  // strictly decreasing, positive

  std::size_t count() const noexcept { return values.size(); }
};

// `count` log-spaced values from hi down to lo.
LambdaGrid lambda_grid(std::size_t count, double lo, double hi);

// binomial: 60 values in [1e-4, 0.1]; gaussian: 60 values in
// [1e-4 lambda_max, lambda_max] with lambda_max = max_j |x_j'y| / n.
LambdaGrid default_lambda_grid(const Dataset& data, std::size_t count = 60);

using FoldPartition = std::vector<std::vector<Index>>;

// Seeded shuffle into k folds whose sizes differ by at most one. With labels,
// each class is dealt round-robin so per-fold class counts differ by at most one.
FoldPartition kfold_split(Index n, int k, std::uint64_t seed,
                          const std::optional<VectorXd>& stratify_labels = std::nullopt);

enum class CvScoring {
  mmd,      // held-out O(n) MMD loss
  classic,  // squared error (gaussian) or misclassification rate (binomial)
};

// Starting point of each fit along a descending lambda path.
enum class PathStart {
  warm,         // previous lambda's state
  initializer,  // the lasso initializer every time
  better,       // whichever of the two has the lower penalized objective
};

std::string_view to_string(PathStart start);
PathStart parse_path_start(std::string_view text);

enum class CvRule {
  min,     // argmin of the mean held-out score
  one_se,  // largest lambda within one standard error of the minimum
  automatic,  // one_se for gaussian, min for binomial
};

struct CvOptions {
  int folds = 5;
  CvRule rule = CvRule::automatic;
  PathStart path_start = PathStart::better;
  std::uint64_t seed = 0;
  CvScoring scoring = CvScoring::mmd;
  bool intercept = false;
};

// Everything needed to build an MmdProblem on any subset of the data.
struct ProblemSpec {
  Dataset data;
  Variant variant = Variant::local;
  Bandwidths bw;
};

struct CvResult {
  double lambda_best = 0.0;
  std::size_t best_index = 0;
  std::vector<double> cv_scores;  // one per grid value
  std::vector<double> cv_se;      // standard error of the fold mean
  std::size_t min_index = 0;      // argmin, whatever the rule
  FoldPartition fold_assignments;
  std::vector<std::pair<std::size_t, int>> flagged;  // (grid index, fold) that diverged
};

// Runs the descending lambda path on each training fold (warm-started, first
// lambda from the fold's initializer) and scores held-out folds. Ties go to
// the larger lambda.
CvResult cross_validate(const ProblemSpec& spec, const LambdaGrid& grid, const AdmmConfig& cfg,
                        const CvOptions& opts);

// Fits the descending path grid[0..stop_index] on `problem`; the first lambda
// starts from `init`, later ones as chosen by `start`. Returns one
// result per visited lambda. A divergence at index k leaves results for
// 0..k-1 and rethrows.
std::vector<FitResult> fit_path(const MmdProblem& problem, const LambdaGrid& grid,
                                std::size_t stop_index, const AdmmConfig& cfg,
                                const ParamState& init, PathStart start = PathStart::better);

// loss(theta, sigma2) + lambda ||eta||_1 over the penalized coordinates.
double penalized_objective(const MmdProblem& problem, const ParamState& state, double lambda);

struct CvFit {
  CvResult cv;
  FitResult fit;          // full-data fit at cv.lambda_best
  Initialization init;    // full-data initializer
};

// Options of the full-data initializer used by fit_with_cv.
InitOptions full_data_init_options(const CvOptions& opts);

// cross_validate, then refit on all of spec.data along the same path.
CvFit fit_with_cv(const ProblemSpec& spec, const LambdaGrid& grid, const AdmmConfig& cfg,
                  const CvOptions& opts);

}  // namespace mmdglm

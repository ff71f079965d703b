#include "mmdglm/model_selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "mmdglm/errors.hpp"
#include "mmdglm/init_lasso.hpp"
#include "mmdglm/logistic_mmd.hpp"
#include "mmdglm/rng.hpp"

namespace mmdglm {

LambdaGrid lambda_grid(std::size_t count, double lo, double hi) {
  if (count < 2) throw ParameterDomainError("lambda grid needs at least 2 values");
  if (!(lo > 0.0) || !(lo < hi) || !std::isfinite(hi)) {
    throw ParameterDomainError("lambda grid needs 0 < lo < hi");
  }
  LambdaGrid grid;
  grid.values.resize(count);
  const double log_hi = std::log(hi);
  const double step = (std::log(lo) - log_hi) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) {
    grid.values[i] = std::exp(log_hi + step * static_cast<double>(i));
  }
  grid.values.front() = hi;
  grid.values.back() = lo;
  return grid;
}

LambdaGrid default_lambda_grid(const Dataset& data, std::size_t count) {
  if (data.family == Family::binomial) return lambda_grid(count, 1e-4, 0.1);
  const double lambda_max = lasso_lambda_max(data.x, data.y, Family::gaussian);
  if (!(lambda_max > 0.0)) throw ParameterDomainError("gaussian lambda grid: X'y is zero");
  return lambda_grid(count, 1e-4 * lambda_max, lambda_max);
}

FoldPartition kfold_split(Index n, int k, std::uint64_t seed,
                          const std::optional<VectorXd>& stratify_labels) {
  if (k < 2 || static_cast<Index>(k) > n) {
    throw ParameterDomainError("kfold_split needs 2 <= k <= n (k = " + std::to_string(k) +
                               ", n = " + std::to_string(n) + ")");
  }
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  Rng rng(derive_seed(seed, 0x4b464f4cULL));
  std::shuffle(order.begin(), order.end(), rng);

  if (stratify_labels) {
    if (stratify_labels->size() != n) throw ContractViolation("stratify labels length != n");
    // Class 0 first, then class 1, each in shuffled order; one running
    // round-robin counter keeps both class and total counts balanced.
    std::stable_partition(order.begin(), order.end(),
                          [&](Index i) { return (*stratify_labels)[i] == 0.0; });
  }

  FoldPartition folds(static_cast<std::size_t>(k));
  for (std::size_t t = 0; t < order.size(); ++t) folds[t % static_cast<std::size_t>(k)].push_back(order[t]);
  for (auto& fold : folds) std::sort(fold.begin(), fold.end());
  return folds;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double score_fit(const MmdProblem& problem, const Dataset& held, const FitResult& fit,
                 CvScoring scoring) {
  const VectorXd& beta = fit.coefficients();
  if (scoring == CvScoring::mmd) {
    return problem.local_loss_on(held, beta, fit.state.sigma2.value_or(1.0));
  }
  const Dataset design = with_intercept_column(held, problem.intercept());
  const VectorXd z = design.x * beta;
  if (held.family == Family::gaussian) {
    return (design.y - z).squaredNorm() / static_cast<double>(held.n());
  }
  Index wrong = 0;
  for (Index i = 0; i < z.size(); ++i) {
    const double label = sigmoid(z[i]) > 0.5 ? 1.0 : 0.0;
    if (label != design.y[i]) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(held.n());
}

std::vector<Index> complement(Index n, const std::vector<Index>& held) {
  std::vector<bool> mask(static_cast<std::size_t>(n), false);
  for (Index i : held) mask[static_cast<std::size_t>(i)] = true;
  std::vector<Index> out;
  for (Index i = 0; i < n; ++i) {
    if (!mask[static_cast<std::size_t>(i)]) out.push_back(i);
  }
  return out;
}

constexpr std::uint64_t kFullDataInitStream = 999;

InitOptions init_options(const CvOptions& opts, std::uint64_t stream) {
  InitOptions io;
  io.folds = opts.folds;
  io.seed = derive_seed(opts.seed, stream);
  io.intercept = opts.intercept;
  return io;
}

const ParamState& path_start(const MmdProblem& problem, const ParamState& previous,
                             const ParamState& init, double lambda, PathStart start) {
  switch (start) {
    case PathStart::warm: return previous;
    case PathStart::initializer: return init;
    case PathStart::better:
      return penalized_objective(problem, init, lambda) < penalized_objective(problem, previous, lambda)
                 ? init
                 : previous;
  }
  return previous;
}

}  // namespace

std::string_view to_string(PathStart start) {
  switch (start) {
    case PathStart::warm: return "warm";
    case PathStart::initializer: return "initializer";
    case PathStart::better: return "better";
  }
  return "better";
}

PathStart parse_path_start(std::string_view text) {
  if (text == "warm") return PathStart::warm;
  if (text == "initializer") return PathStart::initializer;
  if (text == "better") return PathStart::better;
  throw InputError("unknown path start '" + std::string(text) + "' (expected warm|initializer|better)");
}

double penalized_objective(const MmdProblem& problem, const ParamState& state, double lambda) {
  double l1 = 0.0;
  for (Index j = 0; j < state.eta.size(); ++j) {
    if (problem.penalized(j)) l1 += std::abs(state.eta[j]);
  }
  return problem.loss(state.theta, state.sigma2.value_or(1.0)) + lambda * l1;
}

std::vector<FitResult> fit_path(const MmdProblem& problem, const LambdaGrid& grid,
                                std::size_t stop_index, const AdmmConfig& cfg,
                                const ParamState& init, PathStart start) {
  if (stop_index >= grid.count()) throw ContractViolation("fit_path: stop index outside grid");
  std::vector<FitResult> out;
  out.reserve(stop_index + 1);
  for (std::size_t g = 0; g <= stop_index; ++g) {
    const ParamState& from =
        g == 0 ? init : path_start(problem, out.back().state, init, grid.values[g], start);
    out.push_back(admm_fit(problem, grid.values[g], cfg, from));
  }
  return out;
}

CvResult cross_validate(const ProblemSpec& spec, const LambdaGrid& grid, const AdmmConfig& cfg,
                        const CvOptions& opts) {
  validate(spec.data);
  if (grid.count() == 0) throw ContractViolation("cross_validate: empty grid");
  const Index n = spec.data.n();
  std::optional<VectorXd> labels;
  if (spec.data.family == Family::binomial) labels = spec.data.y;

  CvResult result;
  result.fold_assignments = kfold_split(n, opts.folds, opts.seed, labels);
  const std::size_t k = result.fold_assignments.size();
  const std::size_t g_count = grid.count();
  // fold_scores[f][g]
  std::vector<std::vector<double>> fold_scores(k, std::vector<double>(g_count, kInf));
  std::vector<std::string> fold_errors(k);

#pragma omp parallel for schedule(dynamic)
  for (std::size_t f = 0; f < k; ++f) {
    try {
      const std::vector<Index>& held_rows = result.fold_assignments[f];
      const Dataset train = subset_rows(spec.data, complement(n, held_rows));
      const Dataset held = subset_rows(spec.data, held_rows);
      const Initialization init = initialize(train, init_options(opts, 1000 + f));
      const MmdProblem problem(train, spec.variant, spec.bw, opts.intercept);
      ParamState state = init.state;
      for (std::size_t g = 0; g < g_count; ++g) {
        try {
          if (g > 0) state = path_start(problem, state, init.state, grid.values[g], opts.path_start);
          const FitResult fit = admm_fit(problem, grid.values[g], cfg, state);
          fold_scores[f][g] = score_fit(problem, held, fit, opts.scoring);
          state = fit.state;
        } catch (const SolverDivergenceError&) {
          // scored +inf; the next lambda restarts from the initializer
          state = init.state;
        }
      }
    } catch (const std::exception& e) {
      fold_errors[f] = e.what();
    }
  }
  for (std::size_t f = 0; f < k; ++f) {
    if (!fold_errors[f].empty()) throw Error("cross-validation fold " + std::to_string(f) + ": " + fold_errors[f]);
  }

  result.cv_scores.assign(g_count, 0.0);
  result.cv_se.assign(g_count, 0.0);
  for (std::size_t g = 0; g < g_count; ++g) {
    for (std::size_t f = 0; f < k; ++f) {
      if (!std::isfinite(fold_scores[f][g])) {
        result.flagged.emplace_back(g, static_cast<int>(f));
        result.cv_scores[g] = kInf;
      } else if (std::isfinite(result.cv_scores[g])) {
        result.cv_scores[g] += fold_scores[f][g] / static_cast<double>(k);
      }
    }
    if (std::isfinite(result.cv_scores[g]) && k > 1) {
      double ss = 0.0;
      for (std::size_t f = 0; f < k; ++f) {
        const double dev = fold_scores[f][g] - result.cv_scores[g];
        ss += dev * dev;
      }
      result.cv_se[g] = std::sqrt(ss / static_cast<double>(k - 1) / static_cast<double>(k));
    }
  }
  // Strict comparison on a descending grid keeps the larger lambda on ties.
  std::size_t best = 0;
  for (std::size_t g = 1; g < g_count; ++g) {
    if (result.cv_scores[g] < result.cv_scores[best]) best = g;
  }
  result.min_index = best;
  const CvRule rule = opts.rule != CvRule::automatic ? opts.rule
                      : spec.data.family == Family::gaussian ? CvRule::one_se
                                                             : CvRule::min;
  if (rule == CvRule::one_se && std::isfinite(result.cv_scores[best])) {
    const double cutoff = result.cv_scores[best] + result.cv_se[best];
    for (std::size_t g = 0; g < best; ++g) {
      if (result.cv_scores[g] <= cutoff) {
        best = g;
        break;
      }
    }
  }
  result.best_index = best;
  result.lambda_best = grid.values[best];
  return result;
}

InitOptions full_data_init_options(const CvOptions& opts) {
  return init_options(opts, kFullDataInitStream);
}

CvFit fit_with_cv(const ProblemSpec& spec, const LambdaGrid& grid, const AdmmConfig& cfg,
                  const CvOptions& opts) {
  CvFit out;
  out.cv = cross_validate(spec, grid, cfg, opts);
  out.init = initialize(spec.data, full_data_init_options(opts));
  const MmdProblem problem(spec.data, spec.variant, spec.bw, opts.intercept);
  std::vector<FitResult> path =
      fit_path(problem, grid, out.cv.best_index, cfg, out.init.state, opts.path_start);
  out.fit = std::move(path.back());
  return out;
}

}  // namespace mmdglm

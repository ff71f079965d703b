#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mmdglm/model_selection.hpp"
#include "mmdglm/optimizer.hpp"
#include "mmdglm/simulation.hpp"

namespace mmdglm {

// Estimators a study can run. `lasso` is the initializer on its own.
enum class Method { local, full, lasso };

std::string_view to_string(Method method);
Method parse_method(std::string_view text);

// One (error distribution, tau, scheme) combination of a study.
struct StudyCell {
  ErrorDist error;
  double tau = 0.0;
  Scheme scheme = Scheme::none;
};

struct StudySpec {
  Family family = Family::gaussian;
  Index n = 100;
  Index p = 200;
  std::optional<VectorXd> beta_true;  // defaults to the family default pattern
  CovSpec cov;
  std::vector<StudyCell> cells;
  std::vector<Method> methods{Method::local, Method::lasso};
  int replicates = 20;
  std::uint64_t seed = 1;
  Index test_size = 100;
  int workers = 1;
  int cv_folds = 5;
  std::size_t grid_count = 60;
  std::optional<double> grid_lo;
  std::optional<double> grid_hi;
  PathStart path_start = PathStart::better;
  CvScoring scoring = CvScoring::mmd;
  CvRule cv_rule = CvRule::automatic;
  AdmmConfig admm;

  VectorXd beta() const;
  SimDesign design(const StudyCell& cell) const;
  void validate() const;
};

// Flat key=value text, '#' starts a comment. Keys:
//   family, n, p, beta (comma list), cov, err, tau, scheme (comma lists; cells
//   are their product, tau=0 collapses to scheme none), method (repeatable),
//   replicates, seed, test_size, workers, cv_folds, grid_count, grid_lo,
//   grid_hi, path_start (warm|initializer|better),
//   scoring (mmd|classic), cv_rule (auto|min|one_se), rho, learning_rate, inner_max_iter, inner_tol, outer_max_iter,
//   outer_tol.
StudySpec parse_study_spec(std::istream& in);
StudySpec read_study_spec(const std::string& path);

struct ReplicateRow {
  std::size_t cell = 0;
  int replicate = 0;
  Method method = Method::local;
  bool ok = false;
  std::string message;  // failure reason when !ok
  double lambda = 0.0;
  bool converged = false;
  int outer_iters = 0;
  double mse = 0.0;
  int fp = 0;
  int fn = 0;
  int fsl = 0;
  std::optional<double> pe;
  std::optional<double> me;
};

struct StudyResult {
  StudySpec spec;
  std::vector<ReplicateRow> rows;  // ordered by (cell, replicate, method)
};

// Seed of replicate r, shared by all cells so they see the same base draws.
std::uint64_t replicate_seed(std::uint64_t master, int replicate);

// Runs every (cell, replicate) on `spec.workers` threads. Failures become
// flagged rows. Output does not depend on the worker count.
StudyResult run_study(const StudySpec& spec);

// Single replicate of one cell, all methods.
std::vector<ReplicateRow> run_replicate(const StudySpec& spec, std::size_t cell, int replicate);

void write_raw_csv(std::ostream& out, const StudyResult& result);

// Mean and sample standard deviation per (err, tau, scheme, method) over ok rows.
void write_aggregate_csv(std::ostream& out, const StudyResult& result);

// Recomputes the aggregate table from a raw CSV produced by write_raw_csv.
void aggregate_raw_csv(std::istream& raw, std::ostream& out);

}  // namespace mmdglm

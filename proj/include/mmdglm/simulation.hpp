#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mmdglm/rng.hpp"
#include "mmdglm/types.hpp"

namespace mmdglm {

enum class CovKind { identity, ar };

struct CovSpec {
  CovKind kind = CovKind::identity;
  double rho = 0.0;  // ar only
};

enum class ErrorKind { normal, laplace, student_t };

struct ErrorDist {
  ErrorKind kind = ErrorKind::normal;
  double df = 5.0;  // student_t only
};

// X1, X2, Y: gaussian family. LX1, LX2, LXY1, LXY2: binomial family.
enum class Scheme { none, X1, X2, Y, LX1, LX2, LXY1, LXY2 };

struct ContaminationSpec {
  double tau = 0.0;
  Scheme scheme = Scheme::none;
  // Replacement distribution N(location, scale^2). When unset, the scheme
  // default is used: N(5,1) for X1/X2, N(10,1) for Y, N(20,1) for the L schemes.
  std::optional<double> location;
  std::optional<double> scale;

  double replacement_location() const;
  double replacement_scale() const;
};

struct SimDesign {
  Index n = 100;
  Index p = 200;
  Family family = Family::gaussian;
  VectorXd beta_true;
  CovSpec cov;
  ErrorDist error;
  ContaminationSpec contamination;

  void validate() const;
};

// (4, 4, 3, 3, -3, -3, -4, -4, 0, ..., 0)
VectorXd default_beta_gaussian(Index p);
// ten ones followed by zeros
VectorXd default_beta_logistic(Index p);

MatrixXd gen_covariance(const CovSpec& cov, Index p);

// Rows iid N(0, cov) through the Cholesky factor.
MatrixXd sample_design(Index n, const MatrixXd& cov, Rng& rng);

double sample_error(const ErrorDist& dist, Rng& rng);

VectorXd gen_response(const MatrixXd& x, const VectorXd& beta, Family family,
                      const ErrorDist& error, Rng& rng);

// round(tau * n), half to even.
Index contamination_count(double tau, Index n);

struct Contaminated {
  Dataset data;
  std::vector<Index> rows;  // sorted, 0-based
};

Contaminated contaminate(const Dataset& data, const ContaminationSpec& spec, Rng& rng);

struct SimulatedData {
  Dataset train;
  Dataset test;  // clean, empty when test_size == 0
  std::vector<Index> contaminated_rows;
};

// Train and test come from independent streams derived from `seed`.
SimulatedData simulate(const SimDesign& design, std::uint64_t seed, Index test_size);

std::string to_string(const CovSpec& cov);
std::string to_string(const ErrorDist& dist);
std::string_view to_string(Scheme scheme);
CovSpec parse_cov(std::string_view text);       // "identity" | "ar:<rho>"
ErrorDist parse_error(std::string_view text);   // "normal" | "laplace" | "t:<df>"
Scheme parse_scheme(std::string_view text);     // none | X1 | ... | LXY2
Family scheme_family(Scheme scheme);            // throws for none

}  // namespace mmdglm

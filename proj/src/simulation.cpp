#include "mmdglm/simulation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <string>

#include "mmdglm/csv.hpp"
#include "mmdglm/errors.hpp"
#include "mmdglm/logistic_mmd.hpp"

namespace mmdglm {

namespace {

// Stream ids under the simulation seed.
enum Stream : std::uint64_t {
  kTrainDesign = 1,
  kTrainResponse = 2,
  kContamination = 3,
  kTestDesign = 4,
  kTestResponse = 5,
};

std::vector<Index> scheme_columns(Scheme scheme) {
  switch (scheme) {
    case Scheme::X1: return {1};
    case Scheme::X2: return {1, 4};
    case Scheme::LX1: return {1, 4};
    case Scheme::LX2:
    case Scheme::LXY1:
    case Scheme::LXY2: return {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    case Scheme::Y:
    case Scheme::none: return {};
  }
  return {};
}

double parse_number(std::string_view text, std::string_view what) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, value);
  if (res.ec != std::errc{} || res.ptr != end) {
    throw InputError("cannot parse " + std::string(what) + " from '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

double ContaminationSpec::replacement_location() const {
  if (location) return *location;
  switch (scheme) {
    case Scheme::X1:
    case Scheme::X2: return 5.0;
    case Scheme::Y: return 10.0;
    case Scheme::LX1:
    case Scheme::LX2:
    case Scheme::LXY1:
    case Scheme::LXY2: return 20.0;
    case Scheme::none: return 0.0;
  }
  return 0.0;
}

double ContaminationSpec::replacement_scale() const { return scale.value_or(1.0); }

void SimDesign::validate() const {
  if (n < 1 || p < 1) throw ParameterDomainError("design needs n >= 1 and p >= 1");
  if (beta_true.size() != p) throw ContractViolation("beta_true length must equal p");
  if (cov.kind == CovKind::ar && !(std::abs(cov.rho) < 1.0)) {
    throw ParameterDomainError("AR rho must lie in (-1, 1)");
  }
  if (error.kind == ErrorKind::student_t && !(error.df > 2.0)) {
    throw ParameterDomainError("student t errors need df > 2");
  }
  const auto& c = contamination;
  if (!(c.tau >= 0.0 && c.tau <= 1.0)) throw ParameterDomainError("tau must lie in [0, 1]");
  if (c.scheme != Scheme::none && scheme_family(c.scheme) != family) {
    throw ContractViolation("scheme " + std::string(to_string(c.scheme)) +
                            " does not apply to the " + std::string(to_string(family)) +
                            " family");
  }
  for (Index col : scheme_columns(c.scheme)) {
    if (col >= p) throw ContractViolation("scheme needs at least " + std::to_string(col + 1) + " predictors");
  }
}

VectorXd default_beta_gaussian(Index p) {
  VectorXd beta = VectorXd::Zero(p);
  const double head[] = {4, 4, 3, 3, -3, -3, -4, -4};
  for (Index j = 0; j < std::min<Index>(8, p); ++j) beta[j] = head[j];
  return beta;
}

VectorXd default_beta_logistic(Index p) {
  VectorXd beta = VectorXd::Zero(p);
  beta.head(std::min<Index>(10, p)).setOnes();
  return beta;
}

MatrixXd gen_covariance(const CovSpec& cov, Index p) {
  if (p < 1) throw ParameterDomainError("covariance dimension must be positive");
  if (cov.kind == CovKind::identity) return MatrixXd::Identity(p, p);
  if (!(std::abs(cov.rho) < 1.0)) throw ParameterDomainError("AR rho must lie in (-1, 1)");
  MatrixXd sigma(p, p);
  for (Index j = 0; j < p; ++j) {
    for (Index k = 0; k < p; ++k) sigma(j, k) = std::pow(cov.rho, static_cast<double>(std::abs(j - k)));
  }
  return sigma;
}

MatrixXd sample_design(Index n, const MatrixXd& cov, Rng& rng) {
  const Index p = cov.rows();
  if (cov.cols() != p) throw ContractViolation("covariance must be square");
  const Eigen::LLT<MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) throw CovarianceNotPdError("covariance is not positive definite");
  const MatrixXd lower = llt.matrixL();
  std::normal_distribution<double> normal(0.0, 1.0);
  MatrixXd z(n, p);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < p; ++j) z(i, j) = normal(rng);
  }
  return z * lower.transpose();
}

double sample_error(const ErrorDist& dist, Rng& rng) {
  switch (dist.kind) {
    case ErrorKind::normal: {
      std::normal_distribution<double> normal(0.0, 1.0);
      return normal(rng);
    }
    case ErrorKind::laplace: {
      // inverse CDF on u in (-1/2, 1/2)
      std::uniform_real_distribution<double> uniform(-0.5, 0.5);
      double u = uniform(rng);
      while (u == -0.5) u = uniform(rng);
      return -std::copysign(1.0, u) * std::log1p(-2.0 * std::abs(u));
    }
    case ErrorKind::student_t: {
      std::student_t_distribution<double> t(dist.df);
      return t(rng);
    }
  }
  return 0.0;
}

VectorXd gen_response(const MatrixXd& x, const VectorXd& beta, Family family,
                      const ErrorDist& error, Rng& rng) {
  if (x.cols() != beta.size()) throw ContractViolation("beta length must equal the column count");
  const VectorXd eta = x * beta;
  VectorXd y(eta.size());
  if (family == Family::gaussian) {
    for (Index i = 0; i < y.size(); ++i) y[i] = eta[i] + sample_error(error, rng);
  } else {
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    for (Index i = 0; i < y.size(); ++i) y[i] = uniform(rng) < sigmoid(eta[i]) ? 1.0 : 0.0;
  }
  return y;
}

Index contamination_count(double tau, Index n) {
  // nearbyint under the default rounding mode rounds half to even
  return static_cast<Index>(std::nearbyint(tau * static_cast<double>(n)));
}

Contaminated contaminate(const Dataset& data, const ContaminationSpec& spec, Rng& rng) {
  Contaminated out{data, {}};
  const Index n = data.n();
  if (spec.scheme == Scheme::none || spec.tau == 0.0) return out;
  if (scheme_family(spec.scheme) != data.family) {
    throw ContractViolation("scheme " + std::string(to_string(spec.scheme)) +
                            " does not match the dataset family");
  }
  const Index m = contamination_count(spec.tau, n);
  if (m > n || m < 0) throw ContractViolation("contamination count exceeds n");
  const std::vector<Index> columns = scheme_columns(spec.scheme);
  for (Index col : columns) {
    if (col >= data.p()) throw ContractViolation("scheme needs at least " + std::to_string(col + 1) + " predictors");
  }

  // Partial Fisher-Yates: the first m entries are a uniform m-subset in
  // random order.
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  for (Index i = 0; i < m; ++i) {
    std::uniform_int_distribution<Index> pick(i, n - 1);
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(pick(rng))]);
  }
  std::vector<Index> chosen(order.begin(), order.begin() + m);

  std::normal_distribution<double> replacement(spec.replacement_location(),
                                               spec.replacement_scale());
  auto replace_predictors = [&](Index row) {
    for (Index col : columns) out.data.x(row, col) = replacement(rng);
  };
  auto flip = [&](Index row) { out.data.y[row] = 1.0 - out.data.y[row]; };

  switch (spec.scheme) {
    case Scheme::X1:
    case Scheme::X2:
    case Scheme::LX1:
    case Scheme::LX2:
      for (Index row : chosen) replace_predictors(row);
      break;
    case Scheme::Y:
      for (Index row : chosen) out.data.y[row] = replacement(rng);
      break;
    case Scheme::LXY1:
      for (Index row : chosen) {
        flip(row);
        replace_predictors(row);
      }
      break;
    case Scheme::LXY2: {
      // ceil(m/2) label flips, the remaining floor(m/2) get predictor replacement
      const Index flips = (m + 1) / 2;
      for (Index k = 0; k < m; ++k) {
        if (k < flips) flip(chosen[static_cast<std::size_t>(k)]);
        else replace_predictors(chosen[static_cast<std::size_t>(k)]);
      }
      break;
    }
    case Scheme::none: break;
  }
  std::sort(chosen.begin(), chosen.end());
  out.rows = std::move(chosen);
  return out;
}

SimulatedData simulate(const SimDesign& design, std::uint64_t seed, Index test_size) {
  design.validate();
  if (test_size < 0) throw ParameterDomainError("test size must be nonnegative");
  const MatrixXd cov = gen_covariance(design.cov, design.p);

  SimulatedData out;
  Dataset clean;
  clean.family = design.family;
  {
    Rng rng = make_rng(seed, kTrainDesign);
    clean.x = sample_design(design.n, cov, rng);
  }
  {
    Rng rng = make_rng(seed, kTrainResponse);
    clean.y = gen_response(clean.x, design.beta_true, design.family, design.error, rng);
  }
  {
    Rng rng = make_rng(seed, kContamination);
    Contaminated c = contaminate(clean, design.contamination, rng);
    out.train = std::move(c.data);
    out.contaminated_rows = std::move(c.rows);
  }
  out.test.family = design.family;
  if (test_size > 0) {
    Rng rng_x = make_rng(seed, kTestDesign);
    out.test.x = sample_design(test_size, cov, rng_x);
    Rng rng_y = make_rng(seed, kTestResponse);
    out.test.y = gen_response(out.test.x, design.beta_true, design.family, design.error, rng_y);
  } else {
    out.test.x.resize(0, design.p);
    out.test.y.resize(0);
  }
  return out;
}

std::string to_string(const CovSpec& cov) {
  if (cov.kind == CovKind::identity) return "identity";
  return "ar:" + format_double(cov.rho);
}

std::string to_string(const ErrorDist& dist) {
  switch (dist.kind) {
    case ErrorKind::normal: return "normal";
    case ErrorKind::laplace: return "laplace";
    case ErrorKind::student_t: return "t:" + format_double(dist.df);
  }
  return "normal";
}

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::none: return "none";
    case Scheme::X1: return "X1";
    case Scheme::X2: return "X2";
    case Scheme::Y: return "Y";
    case Scheme::LX1: return "LX1";
    case Scheme::LX2: return "LX2";
    case Scheme::LXY1: return "LXY1";
    case Scheme::LXY2: return "LXY2";
  }
  return "none";
}

CovSpec parse_cov(std::string_view text) {
  if (text == "identity") return {CovKind::identity, 0.0};
  if (text.starts_with("ar:")) {
    const double rho = parse_number(text.substr(3), "AR rho");
    if (!(std::abs(rho) < 1.0)) throw InputError("AR rho must lie in (-1, 1)");
    return {CovKind::ar, rho};
  }
  throw InputError("unknown covariance '" + std::string(text) + "' (expected identity|ar:<rho>)");
}

ErrorDist parse_error(std::string_view text) {
  if (text == "normal") return {ErrorKind::normal, 0.0};
  if (text == "laplace") return {ErrorKind::laplace, 0.0};
  if (text.starts_with("t:")) {
    const double df = parse_number(text.substr(2), "degrees of freedom");
    if (!(df > 2.0)) throw InputError("student t errors need df > 2");
    return {ErrorKind::student_t, df};
  }
  throw InputError("unknown error distribution '" + std::string(text) +
                   "' (expected normal|laplace|t:<df>)");
}

Scheme parse_scheme(std::string_view text) {
  for (Scheme s : {Scheme::none, Scheme::X1, Scheme::X2, Scheme::Y, Scheme::LX1, Scheme::LX2,
                   Scheme::LXY1, Scheme::LXY2}) {
    if (text == to_string(s)) return s;
  }
  throw InputError("unknown contamination scheme '" + std::string(text) + "'");
}

Family scheme_family(Scheme scheme) {
  switch (scheme) {
    case Scheme::X1:
    case Scheme::X2:
    case Scheme::Y: return Family::gaussian;
    case Scheme::LX1:
    case Scheme::LX2:
    case Scheme::LXY1:
    case Scheme::LXY2: return Family::binomial;
    case Scheme::none: break;
  }
  throw ContractViolation("scheme none has no family");
}

}  // namespace mmdglm

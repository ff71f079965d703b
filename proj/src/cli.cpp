#include "mmdglm/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "mmdglm/csv.hpp"
#include "mmdglm/errors.hpp"
#include "mmdglm/kernels.hpp"
#include "mmdglm/model_selection.hpp"
#include "mmdglm/simulation.hpp"
#include "mmdglm/study.hpp"

namespace mmdglm::cli {

namespace {

constexpr std::uint64_t kDefaultSeed = 20240601;
constexpr const char* kWorkersEnv = "MMDGLM_WORKERS";

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw InputError("cannot open '" + path + "' for writing");
  return f;
}

std::string join_rows(const std::vector<Index>& rows) {
  std::string s;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (k) s += ',';
    s += std::to_string(rows[k]);
  }
  return s;
}

std::string join_vector(const VectorXd& v) {
  std::string s;
  for (Index k = 0; k < v.size(); ++k) {
    if (k) s += ',';
    s += format_double(v[k]);
  }
  return s;
}

VectorXd parse_vector(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double v = 0.0;
    const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || res.ec != std::errc{} || res.ptr != item.data() + item.size()) {
      throw InputError("cannot parse coefficient '" + item + "'");
    }
    values.push_back(v);
  }
  return Eigen::Map<VectorXd>(values.data(), static_cast<Index>(values.size()));
}

// ---- fit --------------------------------------------------------------------

struct FitArgs {
  std::string input;
  std::string out;
  std::string family = "gaussian";
  std::string variant = "local";
  std::optional<double> lambda;
  bool cv = false;
  std::optional<std::uint64_t> seed;
  bool intercept = false;
  int folds = 5;
  std::size_t grid_count = 60;
  std::optional<double> grid_lo;
  std::optional<double> grid_hi;
  std::string scoring = "mmd";
  std::string cv_rule = "auto";
  std::string path_start = "better";
  std::optional<double> h_x;
  std::optional<double> h_y;
  AdmmConfig admm;
};

int cmd_fit(const FitArgs& a, std::ostream& out, std::ostream& err) {
  const Family family = parse_family(a.family);
  const Variant variant = parse_variant(a.variant);
  if (a.scoring != "mmd" && a.scoring != "classic") {
    throw InputError("--scoring must be mmd or classic");
  }
  const Dataset data = csv_read(a.input, family);
  validate(data);
  const std::uint64_t seed = a.seed.value_or(kDefaultSeed);
  if (!a.seed) err << "mmdglm: no --seed given, using " << seed << '\n';

  Bandwidths bw = default_bandwidths(data);
  if (a.h_x) bw.h_x = *a.h_x;
  if (a.h_y) bw.h_y = *a.h_y;
  bw.validate();

  CvOptions cvo;
  cvo.folds = a.folds;
  cvo.seed = seed;
  cvo.scoring = a.scoring == "mmd" ? CvScoring::mmd : CvScoring::classic;
  cvo.rule = a.cv_rule == "min"      ? CvRule::min
             : a.cv_rule == "one_se" ? CvRule::one_se
                                     : CvRule::automatic;
  cvo.intercept = a.intercept;
  cvo.path_start = parse_path_start(a.path_start);

  FitResult fit;
  std::optional<CvResult> cv;
  LambdaGrid grid;
  if (a.cv) {
    grid = default_lambda_grid(data, a.grid_count);
    if (a.grid_lo || a.grid_hi) {
      grid = lambda_grid(a.grid_count, a.grid_lo.value_or(grid.values.back()),
                         a.grid_hi.value_or(grid.values.front()));
    }
    CvFit cf = fit_with_cv(ProblemSpec{data, variant, bw}, grid, a.admm, cvo);
    fit = std::move(cf.fit);
    cv = std::move(cf.cv);
    out << "selected lambda " << format_double(fit.lambda) << '\n';
  } else {
    const Initialization init = initialize(data, full_data_init_options(cvo));
    const MmdProblem problem(data, variant, bw, a.intercept);
    fit = admm_fit(problem, *a.lambda, a.admm, init.state);
  }

  {
    std::ofstream f = open_out(a.out);
    f << "name,value\n";
    const VectorXd& eta = fit.coefficients();
    Index offset = 0;
    if (a.intercept) {
      f << "intercept," << format_double(eta[0]) << '\n';
      offset = 1;
    }
    for (Index j = offset; j < eta.size(); ++j) f << 'x' << (j - offset + 1) << ',' << format_double(eta[j]) << '\n';
    if (fit.state.sigma2) f << "sigma2," << format_double(*fit.state.sigma2) << '\n';
  }
  {
    std::ofstream f = open_out(a.out + ".diag");
    f << "family=" << to_string(family) << '\n'
      << "variant=" << to_string(variant) << '\n'
      << "seed=" << seed << '\n'
      << "h_x=" << format_double(bw.h_x) << '\n'
      << "h_y=" << format_double(bw.h_y) << '\n'
      << "lambda=" << format_double(fit.lambda) << '\n'
      << "converged=" << (fit.converged ? 1 : 0) << '\n'
      << "outer_iters=" << fit.outer_iters << '\n'
      << "inner_iters=" << fit.inner_iters << '\n';
    if (!fit.primal_residuals.empty()) {
      f << "primal_residual=" << format_double(fit.primal_residuals.back()) << '\n'
        << "dual_residual=" << format_double(fit.dual_residuals.back()) << '\n'
        << "objective=" << format_double(fit.objective_trace.back()) << '\n';
    }
    if (fit.state.sigma2) f << "sigma2=" << format_double(*fit.state.sigma2) << '\n';
    if (cv) {
      f << "cv_best_index=" << cv->best_index << '\n';
      f << "cv_flagged=" << cv->flagged.size() << '\n';
    }
  }
  {
    std::ofstream f = open_out(a.out + ".trace.csv");
    f << "iteration,primal_residual,dual_residual,objective\n";
    for (std::size_t t = 0; t < fit.primal_residuals.size(); ++t) {
      f << t + 1 << ',' << format_double(fit.primal_residuals[t]) << ','
        << format_double(fit.dual_residuals[t]) << ',' << format_double(fit.objective_trace[t]) << '\n';
    }
  }
  if (cv) {
    std::ofstream f = open_out(a.out + ".cv.csv");
    f << "lambda,cv_score\n";
    for (std::size_t g = 0; g < grid.count(); ++g) {
      f << format_double(grid.values[g]) << ',' << format_double(cv->cv_scores[g]) << '\n';
    }
  }
  if (!fit.converged) {
    err << "mmdglm: ADMM did not converge within " << a.admm.outer_max_iter
        << " outer iterations (result written)\n";
    return kNotConverged;
  }
  return kSuccess;
}

// ---- simulate ---------------------------------------------------------------

struct SimArgs {
  std::string family = "gaussian";
  Index n = 100;
  Index p = 200;
  std::string cov = "identity";
  std::string err = "normal";
  double tau = 0.0;
  std::string scheme = "none";
  std::optional<double> location;
  std::optional<double> scale;
  std::optional<std::string> beta;
  std::optional<std::uint64_t> seed;
  Index test_size = 100;
  std::string out;
  std::optional<std::string> manifest;
};

using KeyValues = std::map<std::string, std::string>;

KeyValues read_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open manifest '" + path + "'");
  KeyValues kv;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InputError(path + ":" + std::to_string(line_no) + ": expected key=value");
    }
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

const std::string& require_key(const KeyValues& kv, const std::string& key) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw InputError("manifest is missing '" + key + "'");
  return it->second;
}

template <typename T>
T number(const std::string& text, const std::string& what) {
  T v{};
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw InputError("cannot parse " + what + " '" + text + "'");
  }
  return v;
}

int cmd_simulate(const SimArgs& a, std::ostream& out, std::ostream& err) {
  SimDesign d;
  std::uint64_t seed = 0;
  Index test_size = a.test_size;
  if (a.manifest) {
    const KeyValues kv = read_key_values(*a.manifest);
    d.family = parse_family(require_key(kv, "family"));
    d.n = number<Index>(require_key(kv, "n"), "n");
    d.p = number<Index>(require_key(kv, "p"), "p");
    d.beta_true = parse_vector(require_key(kv, "beta"));
    d.cov = parse_cov(require_key(kv, "cov"));
    d.error = parse_error(require_key(kv, "err"));
    d.contamination.tau = number<double>(require_key(kv, "tau"), "tau");
    d.contamination.scheme = parse_scheme(require_key(kv, "scheme"));
    d.contamination.location = number<double>(require_key(kv, "location"), "location");
    d.contamination.scale = number<double>(require_key(kv, "scale"), "scale");
    seed = number<std::uint64_t>(require_key(kv, "seed"), "seed");
    test_size = number<Index>(require_key(kv, "test_size"), "test_size");
  } else {
    d.family = parse_family(a.family);
    d.n = a.n;
    d.p = a.p;
    d.cov = parse_cov(a.cov);
    d.error = parse_error(a.err);
    d.contamination.tau = a.tau;
    d.contamination.scheme = parse_scheme(a.scheme);
    d.contamination.location = a.location;
    d.contamination.scale = a.scale;
    if (a.beta) {
      d.beta_true = parse_vector(*a.beta);
    } else {
      d.beta_true = d.family == Family::gaussian ? default_beta_gaussian(d.p) : default_beta_logistic(d.p);
    }
    seed = a.seed.value_or(kDefaultSeed);
    if (!a.seed) err << "mmdglm: no --seed given, using " << seed << '\n';
  }
  if (d.contamination.tau == 0.0) d.contamination.scheme = Scheme::none;
  if (d.contamination.scheme == Scheme::none && d.contamination.tau != 0.0) {
    throw InputError("--tau > 0 needs a contamination --scheme");
  }
  try {
    d.validate();
  } catch (const ContractViolation& e) {
    throw InputError(e.what());
  }
  if (test_size < 0) throw InputError("--test-size must be nonnegative");

  const SimulatedData sim = simulate(d, seed, test_size);
  const std::string train_path = a.out + "_train.csv";
  const std::string test_path = a.out + "_test.csv";
  csv_write(train_path, sim.train);
  if (test_size > 0) csv_write(test_path, sim.test);

  std::ofstream m = open_out(a.out + ".manifest");
  m << "family=" << to_string(d.family) << '\n'
    << "n=" << d.n << '\n'
    << "p=" << d.p << '\n'
    << "beta=" << join_vector(d.beta_true) << '\n'
    << "cov=" << to_string(d.cov) << '\n'
    << "err=" << to_string(d.error) << '\n'
    << "tau=" << format_double(d.contamination.tau) << '\n'
    << "scheme=" << to_string(d.contamination.scheme) << '\n'
    << "location=" << format_double(d.contamination.replacement_location()) << '\n'
    << "scale=" << format_double(d.contamination.replacement_scale()) << '\n'
    << "seed=" << seed << '\n'
    << "test_size=" << test_size << '\n'
    << "train=" << train_path << '\n'
    << "test=" << (test_size > 0 ? test_path : std::string()) << '\n'
    << "contaminated_rows=" << join_rows(sim.contaminated_rows) << '\n';
  out << "wrote " << train_path << " (" << sim.train.n() << "x" << sim.train.p() + 1 << ")\n";
  return kSuccess;
}

// ---- replicate / aggregate ---------------------------------------------------

struct ReplicateArgs {
  std::string spec;
  std::string out;
  std::optional<int> workers;
};

int cmd_replicate(const ReplicateArgs& a, std::ostream& out, std::ostream& err) {
  StudySpec spec = read_study_spec(a.spec);
  if (a.workers) {
    spec.workers = *a.workers;
  } else if (const char* env = std::getenv(kWorkersEnv); env && *env) {
    spec.workers = number<int>(env, kWorkersEnv);
  }
  if (spec.workers < 1) throw InputError("worker count must be at least 1");
  const StudyResult result = run_study(spec);
  {
    std::ofstream f = open_out(a.out + "_raw.csv");
    write_raw_csv(f, result);
  }
  {
    std::ofstream f = open_out(a.out + "_aggregate.csv");
    write_aggregate_csv(f, result);
  }
  std::size_t failed = 0;
  for (const auto& row : result.rows) failed += row.ok ? 0 : 1;
  out << "wrote " << a.out << "_raw.csv and " << a.out << "_aggregate.csv (" << result.rows.size()
      << " rows, " << failed << " failed)\n";
  if (failed) err << "mmdglm: " << failed << " replicate rows failed, see the message column\n";
  return kSuccess;
}

int cmd_aggregate(const std::string& raw_path, const std::string& out_path) {
  std::ifstream in(raw_path);
  if (!in) throw InputError("cannot open '" + raw_path + "'");
  std::ofstream f = open_out(out_path);
  aggregate_raw_csv(in, f);
  return kSuccess;
}

void add_admm_options(CLI::App* sub, AdmmConfig& cfg) {
  sub->add_option("--rho", cfg.rho, "ADMM penalty parameter")->capture_default_str();
  sub->add_option("--learning-rate", cfg.learning_rate, "AdaGrad learning rate")->capture_default_str();
  sub->add_option("--inner-max-iter", cfg.inner_max_iter)->capture_default_str();
  sub->add_option("--inner-tol", cfg.inner_tol)->capture_default_str();
  sub->add_option("--outer-max-iter", cfg.outer_max_iter)->capture_default_str();
  sub->add_option("--outer-tol", cfg.outer_tol)->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse robust GLM estimation with MMD losses"};
  app.name("mmdglm");
  app.require_subcommand(1);

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit one dataset");
  fit_cmd->add_option("input", fit.input, "CSV with header y,x1,...,xp")->required();
  fit_cmd->add_option("-o,--out", fit.out, "Coefficient CSV path")->required();
  fit_cmd->add_option("--family", fit.family)->check(CLI::IsMember({"gaussian", "binomial"}))->capture_default_str();
  fit_cmd->add_option("--variant", fit.variant)->check(CLI::IsMember({"local", "full"}))->capture_default_str();
  auto* lambda_opt = fit_cmd->add_option("--lambda", fit.lambda, "Fixed penalty")->check(CLI::PositiveNumber);
  auto* cv_flag = fit_cmd->add_flag("--cv", fit.cv, "Choose lambda by cross-validation");
  lambda_opt->excludes(cv_flag);
  fit_cmd->add_option("--seed", fit.seed);
  fit_cmd->add_flag("--intercept", fit.intercept, "Fit an unpenalized intercept");
  fit_cmd->add_option("--folds", fit.folds)->check(CLI::Range(2, 1000))->capture_default_str();
  fit_cmd->add_option("--grid-count", fit.grid_count)->check(CLI::Range(1, 10000))->capture_default_str();
  fit_cmd->add_option("--grid-lo", fit.grid_lo)->check(CLI::PositiveNumber);
  fit_cmd->add_option("--grid-hi", fit.grid_hi)->check(CLI::PositiveNumber);
  fit_cmd->add_option("--scoring", fit.scoring, "mmd or classic")
      ->check(CLI::IsMember({"mmd", "classic"}))
      ->capture_default_str();
  fit_cmd->add_option("--cv-rule", fit.cv_rule, "auto (one_se for gaussian, min for binomial), min or one_se")
      ->check(CLI::IsMember({"auto", "min", "one_se"}))
      ->capture_default_str();
  fit_cmd->add_option("--path-start", fit.path_start, "warm, initializer or better")->capture_default_str();
  fit_cmd->add_option("--hx", fit.h_x, "Predictor kernel bandwidth")->check(CLI::PositiveNumber);
  fit_cmd->add_option("--hy", fit.h_y, "Response kernel bandwidth")->check(CLI::PositiveNumber);
  add_admm_options(fit_cmd, fit.admm);

  SimArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Generate a synthetic dataset");
  sim_cmd->add_option("-o,--out", sim.out, "Output prefix")->required();
  sim_cmd->add_option("--manifest", sim.manifest, "Regenerate from a manifest");
  sim_cmd->add_option("--family", sim.family)->check(CLI::IsMember({"gaussian", "binomial"}))->capture_default_str();
  sim_cmd->add_option("--n", sim.n)->check(CLI::PositiveNumber)->capture_default_str();
  sim_cmd->add_option("--p", sim.p)->check(CLI::PositiveNumber)->capture_default_str();
  sim_cmd->add_option("--cov", sim.cov, "identity or ar:<rho>")->capture_default_str();
  sim_cmd->add_option("--err", sim.err, "normal, laplace or t:<df>")->capture_default_str();
  sim_cmd->add_option("--tau", sim.tau)->check(CLI::Range(0.0, 1.0))->capture_default_str();
  sim_cmd->add_option("--scheme", sim.scheme, "none X1 X2 Y LX1 LX2 LXY1 LXY2")->capture_default_str();
  sim_cmd->add_option("--location", sim.location, "Replacement mean");
  sim_cmd->add_option("--scale", sim.scale, "Replacement standard deviation")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--beta", sim.beta, "Comma separated true coefficients");
  sim_cmd->add_option("--seed", sim.seed);
  sim_cmd->add_option("--test-size", sim.test_size)->check(CLI::NonNegativeNumber)->capture_default_str();

  ReplicateArgs rep;
  auto* rep_cmd = app.add_subcommand("replicate", "Run a Monte Carlo study");
  rep_cmd->add_option("spec", rep.spec, "Study spec (key=value)")->required();
  rep_cmd->add_option("-o,--out", rep.out, "Output prefix")->required();
  rep_cmd->add_option("--workers", rep.workers, std::string("Worker threads (default: $") + kWorkersEnv + " or the spec)");

  std::string agg_in, agg_out;
  auto* agg_cmd = app.add_subcommand("aggregate", "Rebuild the aggregate table from a raw CSV");
  agg_cmd->add_option("raw", agg_in)->required();
  agg_cmd->add_option("-o,--out", agg_out)->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kInputError;
  }

  try {
    if (*fit_cmd) {
      if (!fit.cv && !fit.lambda) {
        err << "mmdglm fit: give either --lambda or --cv\n";
        return kInputError;
      }
      return cmd_fit(fit, out, err);
    }
    if (*sim_cmd) return cmd_simulate(sim, out, err);
    if (*rep_cmd) return cmd_replicate(rep, out, err);
    if (*agg_cmd) return cmd_aggregate(agg_in, agg_out);
  } catch (const SolverDivergenceError& e) {
    err << "mmdglm: solver diverged: " << e.what() << '\n';
    return kNotConverged;
  } catch (const Error& e) {
    err << "mmdglm: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    err << "mmdglm: internal error: " << e.what() << '\n';
    return kInternalError;
  }
  return kInternalError;
}

}  // namespace mmdglm::cli

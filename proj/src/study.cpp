#include "mmdglm/study.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "mmdglm/csv.hpp"
#include "mmdglm/errors.hpp"
#include "mmdglm/kernels.hpp"
#include "mmdglm/metrics.hpp"
#include "mmdglm/model_selection.hpp"
#include "mmdglm/parallel.hpp"

namespace mmdglm {

namespace {

constexpr std::uint64_t kReplicateStream = 0x7265706cULL;
constexpr std::uint64_t kCvStream = 0x6376ULL;

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::size_t end = comma == std::string_view::npos ? text.size() : comma;
    out.emplace_back(trim(text.substr(start, end - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T>
T parse_value(std::string_view text, std::string_view key) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, value);
  if (text.empty() || res.ec != std::errc{} || res.ptr != end) {
    throw InputError("study spec: cannot parse '" + std::string(text) + "' for key '" +
                     std::string(key) + "'");
  }
  return value;
}

std::string sanitize(std::string text) {
  for (char& c : text) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return text;
}

std::string optional_text(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

// Grid used for every MMD fit of a replicate.
LambdaGrid study_grid(const StudySpec& spec, const Dataset& train) {
  if (spec.grid_lo || spec.grid_hi) {
    const LambdaGrid fallback = default_lambda_grid(train, spec.grid_count);
    const double lo = spec.grid_lo.value_or(fallback.values.back());
    const double hi = spec.grid_hi.value_or(fallback.values.front());
    return lambda_grid(spec.grid_count, lo, hi);
  }
  return default_lambda_grid(train, spec.grid_count);
}

void fill_metrics(ReplicateRow& row, const VectorXd& beta_hat, const VectorXd& beta_true,
                  const Dataset& test) {
  const EvalReport r = evaluate(beta_hat, beta_true, test);
  row.mse = r.mse;
  row.fp = r.fp;
  row.fn = r.fn;
  row.fsl = r.fsl;
  row.pe = r.pe;
  row.me = r.me_percent;
}

}  // namespace

std::string_view to_string(Method method) {
  switch (method) {
    case Method::local: return "local";
    case Method::full: return "full";
    case Method::lasso: return "lasso";
  }
  return "local";
}

Method parse_method(std::string_view text) {
  if (text == "local") return Method::local;
  if (text == "full") return Method::full;
  if (text == "lasso") return Method::lasso;
  throw InputError("unknown method '" + std::string(text) + "' (expected local|full|lasso)");
}

VectorXd StudySpec::beta() const {
  if (beta_true) return *beta_true;
  return family == Family::gaussian ? default_beta_gaussian(p) : default_beta_logistic(p);
}

SimDesign StudySpec::design(const StudyCell& cell) const {
  SimDesign d;
  d.n = n;
  d.p = p;
  d.family = family;
  d.beta_true = beta();
  d.cov = cov;
  d.error = cell.error;
  d.contamination.tau = cell.tau;
  d.contamination.scheme = cell.scheme;
  return d;
}

void StudySpec::validate() const {
  if (replicates < 1) throw InputError("study spec: replicates must be at least 1");
  if (test_size < 1) throw InputError("study spec: test_size must be at least 1");
  if (workers < 1) throw InputError("study spec: workers must be at least 1");
  if (cv_folds < 2) throw InputError("study spec: cv_folds must be at least 2");
  if (grid_count < 1) throw InputError("study spec: grid_count must be at least 1");
  if (methods.empty()) throw InputError("study spec: no methods");
  if (cells.empty()) throw InputError("study spec: no cells");
  if (beta_true && beta_true->size() != p) throw InputError("study spec: beta length must equal p");
  admm.validate();
  for (const StudyCell& cell : cells) {
    try {
      design(cell).validate();
    } catch (const Error& e) {
      throw InputError(std::string("study spec: ") + e.what());
    }
  }
}

StudySpec parse_study_spec(std::istream& in) {
  StudySpec spec;
  std::vector<ErrorDist> errs{ErrorDist{}};
  std::vector<double> taus{0.0};
  std::vector<Scheme> schemes{Scheme::none};
  bool methods_given = false;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw InputError("study spec line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key(trim(view.substr(0, eq)));
    const std::string_view value = trim(view.substr(eq + 1));
    try {
      if (key == "family") spec.family = parse_family(value);
      else if (key == "n") spec.n = parse_value<Index>(value, key);
      else if (key == "p") spec.p = parse_value<Index>(value, key);
      else if (key == "beta") {
        const auto items = split_list(value);
        VectorXd beta(static_cast<Index>(items.size()));
        for (std::size_t j = 0; j < items.size(); ++j) beta[static_cast<Index>(j)] = parse_value<double>(items[j], key);
        spec.beta_true = beta;
      } else if (key == "cov") spec.cov = parse_cov(value);
      else if (key == "err") {
        errs.clear();
        for (const auto& item : split_list(value)) errs.push_back(parse_error(item));
      } else if (key == "tau") {
        taus.clear();
        for (const auto& item : split_list(value)) taus.push_back(parse_value<double>(item, key));
      } else if (key == "scheme") {
        schemes.clear();
        for (const auto& item : split_list(value)) schemes.push_back(parse_scheme(item));
      } else if (key == "method") {
        if (!methods_given) spec.methods.clear();
        methods_given = true;
        for (const auto& item : split_list(value)) spec.methods.push_back(parse_method(item));
      } else if (key == "replicates") spec.replicates = parse_value<int>(value, key);
      else if (key == "seed") spec.seed = parse_value<std::uint64_t>(value, key);
      else if (key == "test_size") spec.test_size = parse_value<Index>(value, key);
      else if (key == "workers") spec.workers = parse_value<int>(value, key);
      else if (key == "cv_folds") spec.cv_folds = parse_value<int>(value, key);
      else if (key == "grid_count") spec.grid_count = parse_value<std::size_t>(value, key);
      else if (key == "grid_lo") spec.grid_lo = parse_value<double>(value, key);
      else if (key == "grid_hi") spec.grid_hi = parse_value<double>(value, key);
      else if (key == "path_start") spec.path_start = parse_path_start(value);
      else if (key == "reset_accumulator") spec.admm.reset_accumulator = parse_value<int>(value, key) != 0;
      else if (key == "scoring") {
        if (value == "mmd") spec.scoring = CvScoring::mmd;
        else if (value == "classic") spec.scoring = CvScoring::classic;
        else throw InputError("scoring must be mmd or classic");
      } else if (key == "cv_rule") {
        if (value == "auto") spec.cv_rule = CvRule::automatic;
        else if (value == "min") spec.cv_rule = CvRule::min;
        else if (value == "one_se") spec.cv_rule = CvRule::one_se;
        else throw InputError("cv_rule must be auto, min or one_se");
      } else if (key == "rho") spec.admm.rho = parse_value<double>(value, key);
      else if (key == "learning_rate") spec.admm.learning_rate = parse_value<double>(value, key);
      else if (key == "inner_max_iter") spec.admm.inner_max_iter = parse_value<int>(value, key);
      else if (key == "inner_tol") spec.admm.inner_tol = parse_value<double>(value, key);
      else if (key == "outer_max_iter") spec.admm.outer_max_iter = parse_value<int>(value, key);
      else if (key == "outer_tol") spec.admm.outer_tol = parse_value<double>(value, key);
      else throw InputError("unknown key '" + key + "'");
    } catch (const InputError& e) {
      throw InputError("study spec line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (spec.family == Family::binomial) errs = {ErrorDist{}};
  for (const ErrorDist& err : errs) {
    for (double tau : taus) {
      if (tau == 0.0) {
        spec.cells.push_back({err, 0.0, Scheme::none});
        continue;
      }
      for (Scheme scheme : schemes) spec.cells.push_back({err, tau, scheme});
    }
  }
  spec.validate();
  return spec;
}

StudySpec read_study_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open study spec '" + path + "'");
  return parse_study_spec(in);
}

std::uint64_t replicate_seed(std::uint64_t master, int replicate) {
  return derive_seed(derive_seed(master, kReplicateStream), static_cast<std::uint64_t>(replicate));
}

std::vector<ReplicateRow> run_replicate(const StudySpec& spec, std::size_t cell, int replicate) {
  std::vector<ReplicateRow> rows;
  for (Method m : spec.methods) {
    ReplicateRow row;
    row.cell = cell;
    row.replicate = replicate;
    row.method = m;
    rows.push_back(row);
  }
  const std::uint64_t seed = replicate_seed(spec.seed, replicate);
  SimulatedData sim;
  try {
    sim = simulate(spec.design(spec.cells.at(cell)), seed, spec.test_size);
  } catch (const std::exception& e) {
    for (auto& row : rows) row.message = sanitize(std::string("simulation failed: ") + e.what());
    return rows;
  }
  const VectorXd beta_true = spec.beta();

  CvOptions cv;
  cv.folds = spec.cv_folds;
  cv.seed = derive_seed(seed, kCvStream);
  cv.path_start = spec.path_start;
  cv.scoring = spec.scoring;
  cv.rule = spec.cv_rule;
  std::optional<Initialization> init;

  for (ReplicateRow& row : rows) {
    try {
      if (row.method == Method::lasso) {
        if (!init) init = initialize(sim.train, full_data_init_options(cv));
        row.lambda = init->cv_lambda;
        row.converged = init->lasso.converged;
        row.outer_iters = init->lasso.iterations;
        fill_metrics(row, init->lasso.beta, beta_true, sim.test);
      } else {
        ProblemSpec ps{sim.train, row.method == Method::full ? Variant::full : Variant::local,
                       default_bandwidths(sim.train)};
        const CvFit fit = fit_with_cv(ps, study_grid(spec, sim.train), spec.admm, cv);
        if (!init) init = fit.init;
        row.lambda = fit.fit.lambda;
        row.converged = fit.fit.converged;
        row.outer_iters = fit.fit.outer_iters;
        fill_metrics(row, fit.fit.coefficients(), beta_true, sim.test);
      }
      row.ok = true;
    } catch (const std::exception& e) {
      row.ok = false;
      row.message = sanitize(e.what());
    }
  }
  return rows;
}

StudyResult run_study(const StudySpec& spec) {
  spec.validate();
  const std::size_t cells = spec.cells.size();
  const std::size_t tasks = cells * static_cast<std::size_t>(spec.replicates);
  std::vector<std::vector<ReplicateRow>> slots(tasks);
  auto run_task = [&](std::size_t t) {
    slots[t] = run_replicate(spec, t / static_cast<std::size_t>(spec.replicates),
                             static_cast<int>(t % static_cast<std::size_t>(spec.replicates)));
  };

  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(spec.workers), tasks);
  if (workers <= 1) {
    for (std::size_t t = 0; t < tasks; ++t) run_task(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        parallel::set_threads(1);
        for (std::size_t t = next++; t < tasks; t = next++) run_task(t);
      });
    }
    for (auto& th : pool) th.join();
  }

  StudyResult result;
  result.spec = spec;
  for (auto& slot : slots) {
    for (auto& row : slot) result.rows.push_back(std::move(row));
  }
  return result;
}

void write_raw_csv(std::ostream& out, const StudyResult& result) {
  out << "cell,err,tau,scheme,replicate,method,ok,lambda,converged,outer_iters,mse,fp,fn,fsl,pe,me,"
         "message\n";
  for (const ReplicateRow& row : result.rows) {
    const StudyCell& cell = result.spec.cells.at(row.cell);
    out << row.cell << ',' << to_string(cell.error) << ',' << format_double(cell.tau) << ','
        << to_string(cell.scheme) << ',' << row.replicate << ',' << to_string(row.method) << ','
        << (row.ok ? 1 : 0) << ',';
    if (row.ok) {
      out << format_double(row.lambda) << ',' << (row.converged ? 1 : 0) << ',' << row.outer_iters
          << ',' << format_double(row.mse) << ',' << row.fp << ',' << row.fn << ',' << row.fsl << ','
          << optional_text(row.pe) << ',' << optional_text(row.me) << ',';
    } else {
      out << ",,,,,,,,,";
    }
    out << row.message << '\n';
  }
}

void write_aggregate_csv(std::ostream& out, const StudyResult& result) {
  // Going through the raw text keeps the two tables identical by construction.
  std::stringstream raw;
  write_raw_csv(raw, result);
  aggregate_raw_csv(raw, out);
}

void aggregate_raw_csv(std::istream& raw, std::ostream& out) {
  static const std::vector<std::string> kMetrics{"mse", "fp", "fn", "fsl", "pe", "me"};
  std::string line;
  if (!std::getline(raw, line)) throw InputError("raw results: empty input");
  const auto header = split_list(line);
  std::map<std::string, std::size_t> col;
  for (std::size_t j = 0; j < header.size(); ++j) col[header[j]] = j;
  for (const char* needed : {"err", "tau", "scheme", "method", "ok"}) {
    if (!col.count(needed)) throw InputError(std::string("raw results: missing column '") + needed + "'");
  }
  for (const auto& m : kMetrics) {
    if (!col.count(m)) throw InputError("raw results: missing column '" + m + "'");
  }

  struct Group {
    std::vector<std::string> key;
    int ok = 0;
    int failed = 0;
    std::vector<std::vector<double>> values = std::vector<std::vector<double>>(kMetrics.size());
  };
  std::vector<Group> groups;
  std::map<std::vector<std::string>, std::size_t> index;
  int line_no = 1;
  while (std::getline(raw, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_list(line);
    if (cells.size() != header.size()) {
      throw InputError("raw results line " + std::to_string(line_no) + ": expected " +
                       std::to_string(header.size()) + " fields");
    }
    std::vector<std::string> key{cells[col["err"]], cells[col["tau"]], cells[col["scheme"]],
                                 cells[col["method"]]};
    auto [it, inserted] = index.emplace(key, groups.size());
    if (inserted) groups.push_back(Group{key});
    Group& g = groups[it->second];
    if (cells[col["ok"]] != "1") {
      ++g.failed;
      continue;
    }
    ++g.ok;
    for (std::size_t m = 0; m < kMetrics.size(); ++m) {
      const std::string& text = cells[col[kMetrics[m]]];
      if (!text.empty()) g.values[m].push_back(parse_value<double>(text, kMetrics[m]));
    }
  }

  out << "err,tau,scheme,method,n_ok,n_failed";
  for (const auto& m : kMetrics) out << ',' << m << "_mean," << m << "_sd";
  out << '\n';
  for (const Group& g : groups) {
    out << g.key[0] << ',' << g.key[1] << ',' << g.key[2] << ',' << g.key[3] << ',' << g.ok << ','
        << g.failed;
    for (const auto& v : g.values) {
      if (v.empty()) {
        out << ",NA,NA";
        continue;
      }
      double sum = 0.0;
      for (double x : v) sum += x;
      const double mean = sum / static_cast<double>(v.size());
      out << ',' << format_double(mean);
      if (v.size() < 2) {
        out << ",NA";
        continue;
      }
      double ss = 0.0;
      for (double x : v) ss += (x - mean) * (x - mean);
      out << ',' << format_double(std::sqrt(ss / static_cast<double>(v.size() - 1)));
    }
    out << '\n';
  }
}

}  // namespace mmdglm

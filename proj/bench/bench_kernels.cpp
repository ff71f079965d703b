// Parallel pairwise kernels against the serial pair-by-pair reference.

#include <benchmark/benchmark.h>

#include <random>

#include "mmdglm/gaussian_mmd.hpp"
#include "mmdglm/logistic_mmd.hpp"
#include "mmdglm/reference.hpp"

using namespace mmdglm;

namespace {

Dataset make_data(Index n, Index p, Family family) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> z;
  std::bernoulli_distribution coin(0.5);
  Dataset d;
  d.family = family;
  d.x.resize(n, p);
  d.y.resize(n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < p; ++j) d.x(i, j) = z(rng);
    d.y[i] = family == Family::gaussian ? z(rng) : (coin(rng) ? 1.0 : 0.0);
  }
  return d;
}

VectorXd make_theta(Index p) {
  VectorXd t = VectorXd::Zero(p);
  for (Index j = 0; j < std::min<Index>(p, 8); ++j) t[j] = 0.5 * (j % 2 ? -1 : 1);
  return t;
}

constexpr Index kP = 200;

void BM_GramParallel(benchmark::State& state) {
  const Dataset d = make_data(state.range(0), kP, Family::gaussian);
  for (auto _ : state) benchmark::DoNotOptimize(gram_matrix(d.x, 10.0));
}

void BM_GramReference(benchmark::State& state) {
  const Dataset d = make_data(state.range(0), kP, Family::gaussian);
  for (auto _ : state) benchmark::DoNotOptimize(reference::gram_matrix(d.x, 10.0));
}

void BM_GaussianGradParallel(benchmark::State& state) {
  const Dataset d = make_data(state.range(0), kP, Family::gaussian);
  const MatrixXd gram = gram_matrix(d.x, 10.0);
  const VectorXd theta = make_theta(kP);
  for (auto _ : state) benchmark::DoNotOptimize(grad_pairwise_gaussian(theta, d, 1.0, 2.0, gram));
}

void BM_GaussianGradReference(benchmark::State& state) {
  const Dataset d = make_data(state.range(0), kP, Family::gaussian);
  const MatrixXd gram = gram_matrix(d.x, 10.0);
  const VectorXd theta = make_theta(kP);
  for (auto _ : state) benchmark::DoNotOptimize(reference::grad_pairwise_gaussian(theta, d, 1.0, 2.0, gram));
}

void BM_LogisticGradParallel(benchmark::State& state) {
  const Dataset d = make_data(state.range(0), kP, Family::binomial);
  const MatrixXd gram = gram_matrix(d.x, 10.0);
  const VectorXd theta = make_theta(kP);
  for (auto _ : state) benchmark::DoNotOptimize(grad_pairwise_logistic(theta, d, 0.7, gram));
}

void BM_LogisticGradReference(benchmark::State& state) {
  const Dataset d = make_data(state.range(0), kP, Family::binomial);
  const MatrixXd gram = gram_matrix(d.x, 10.0);
  const VectorXd theta = make_theta(kP);
  for (auto _ : state) benchmark::DoNotOptimize(reference::grad_pairwise_logistic(theta, d, 0.7, gram));
}

}  // namespace

BENCHMARK(BM_GramParallel)->Arg(100)->Arg(400)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_GramReference)->Arg(100)->Arg(400)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_GaussianGradParallel)->Arg(100)->Arg(400)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_GaussianGradReference)->Arg(100)->Arg(400)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_LogisticGradParallel)->Arg(100)->Arg(400)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_LogisticGradReference)->Arg(100)->Arg(400)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include <random>

#include "shufflebn/shufflebn.hpp"

using namespace shufflebn;

namespace {

Matrix gaussian(Index rows, Index cols, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> g;
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = g(rng);
  return m;
}

RowVector labels(Index n, std::uint64_t seed) {
  Rng rng(seed);
  std::bernoulli_distribution b(0.5);
  RowVector y(n);
  for (Index i = 0; i < n; ++i) y(i) = b(rng) ? 1.0 : -1.0;
  return y;
}

void BM_NormalizeSS(benchmark::State& state) {
  const Index n = state.range(0), d = 10, B = 10;
  Dataset ds = Dataset::regression(gaussian(d, n, 1), gaussian(1, n, 2));
  BatchPlan plan = BatchPlan::random(n, B, 3);
  for (auto _ : state) benchmark::DoNotOptimize(normalize_ss(ds, plan).Xbar.data());
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_NormalizeSS)->Arg(100)->Arg(1000)->Arg(10000);

void BM_ShallowGradient(benchmark::State& state) {
  const Index B = state.range(0), d = 10;
  Matrix Xbar = bn_batch(gaussian(d, B, 4), 1e-5);
  Matrix Y = gaussian(1, B, 5);
  ModelParams p{gaussian(1, d, 6), Vector::Ones(d)};
  for (auto _ : state) benchmark::DoNotOptimize(grad_minibatch_sq(p, Xbar, Y).gW.data());
}
BENCHMARK(BM_ShallowGradient)->Arg(10)->Arg(100);

void BM_DeepGradient(benchmark::State& state) {
  const Index depth = state.range(0), n = 64;
  std::vector<Index> widths(static_cast<std::size_t>(depth), 4);
  widths.push_back(1);
  DeepLinearParams p = DeepLinearParams::default_init(widths, 7);
  Matrix X = gaussian(4, n, 8);
  Matrix y = labels(n, 9);
  auto batches = uniform_batches(n, 16);
  for (auto _ : state) benchmark::DoNotOptimize(deep_grad(Loss::logistic, p, X, y, batches, 1e-5).layers.size());
}
BENCHMARK(BM_DeepGradient)->DenseRange(1, 3);

void BM_TrainSSEpochs(benchmark::State& state) {
  Dataset ds = gen_synthetic_regression(SyntheticOptions{}, 10);
  BatchPlan plan = BatchPlan::random(ds.n(), 10, 11);
  TrainOptions opt;
  opt.epochs = state.range(0);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        train_ss(ds, plan, ModelParams::paper_init(1, ds.d()), StepsizeSchedule::manual(1e-3, 0.6), opt).params.W.data());
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TrainSSEpochs)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_Decompose(benchmark::State& state) {
  const Index q = state.range(0);
  Matrix X = gaussian(3, q, 12);
  RowVector y = labels(q, 13);
  for (auto _ : state) benchmark::DoNotOptimize(decompose(X, y).sc_indices.size());
}
BENCHMARK(BM_Decompose)->Arg(8)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);

void BM_MaxMargin(benchmark::State& state) {
  const Index q = state.range(0);
  Matrix X = gaussian(5, q, 14);
  RowVector y(q);
  for (Index j = 0; j < q; ++j) {
    y(j) = j % 2 ? 1.0 : -1.0;
    X(0, j) = y(j) * (0.5 + std::abs(X(0, j)));
  }
  for (auto _ : state) benchmark::DoNotOptimize(max_margin(X, y).margin);
}
BENCHMARK(BM_MaxMargin)->Arg(32)->Arg(256)->Unit(benchmark::kMicrosecond);

void BM_MonochromaticStats(benchmark::State& state) {
  RowVector y(512);
  y.head(256).setConstant(1.0);
  y.tail(256).setConstant(-1.0);
  for (auto _ : state) benchmark::DoNotOptimize(monochromatic_stats(y, 2, state.range(0), 15).empirical_mean);
}
BENCHMARK(BM_MonochromaticStats)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_ToyRegressionMC(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(mc_toy_regression(50, state.range(0), 16).frac_nonzero);
}
BENCHMARK(BM_ToyRegressionMC)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

// Microbenchmarks for the inner loops every Monte Carlo sweep lives in:
// estimating the lag functionals, scanning subsets, factoring and drawing
// from a banded covariance.  Run `tcov_bench --benchmark_filter=...` to
// narrow down.

#include <benchmark/benchmark.h>

#include <cstddef>
#include <vector>

#include "tcov/lag_stats.hpp"
#include "tcov/rng.hpp"
#include "tcov/sampling.hpp"
#include "tcov/toeplitz.hpp"

namespace {

// A positive definite banded spec: geometrically decaying diagonals keep the
// row sums under sigma0 (diagonal dominance), so any bandwidth works.
tcov::ToeplitzSpec banded_spec(std::size_t p, std::size_t bandwidth) {
  tcov::ToeplitzSpec spec{p, 1.0, std::vector<double>(p, 0.0)};
  spec.diagonals[0] = 1.0;
  double value = 0.2;
  for (std::size_t j = 1; j <= bandwidth && j < p; ++j, value *= 0.5)
    spec.diagonals[j] = value;
  return spec;
}

tcov::SampleSet gaussian_block(std::size_t n, std::size_t p) {
  tcov::RngStream rng(7, 0);
  tcov::SampleSet samples{n, p, std::vector<double>(n * p)};
  for (double& x : samples.data) x = rng.normal();
  return samples;
}

void bm_lag_functionals(benchmark::State& state) {
  const std::size_t n = 100;
  const std::size_t p = std::size_t(state.range(0));
  const std::size_t S = std::size_t(state.range(1));
  const tcov::SampleSet samples = gaussian_block(n, p);
  for (auto _ : state)
    benchmark::DoNotOptimize(tcov::lag_functionals(samples, S));
  state.SetItemsProcessed(state.iterations() * n * p * S);
}
BENCHMARK(bm_lag_functionals)->Args({100, 10})->Args({1000, 31})->Args({4000, 63});

void bm_scan_statistic(benchmark::State& state) {
  const std::size_t S = std::size_t(state.range(0));
  tcov::RngStream rng(7, 1);
  tcov::DiagonalStats stats{std::vector<double>(S), 1.0};
  for (double& v : stats.xi) v = rng.normal();
  const std::size_t s = (S + 1) / 2;
  for (auto _ : state)
    benchmark::DoNotOptimize(tcov::scan_statistic(stats, s, true));
}
BENCHMARK(bm_scan_statistic)->Arg(10)->Arg(31)->Arg(100);

void bm_banded_cholesky(benchmark::State& state) {
  const std::size_t p = std::size_t(state.range(0));
  const tcov::ToeplitzSpec spec = banded_spec(p, std::size_t(state.range(1)));
  for (auto _ : state)
    benchmark::DoNotOptimize(tcov::banded_cholesky(spec));
}
BENCHMARK(bm_banded_cholesky)->Args({100, 10})->Args({1000, 31});

void bm_gaussian_draw(benchmark::State& state) {
  const std::size_t p = std::size_t(state.range(0));
  const tcov::GaussianSampler sampler(banded_spec(p, std::size_t(state.range(1))));
  tcov::RngStream rng(7, 2);
  std::vector<double> row(p);
  for (auto _ : state) {
    sampler.draw(rng, row.data());
    benchmark::DoNotOptimize(row.data());
  }
  state.SetItemsProcessed(state.iterations() * p);
}
BENCHMARK(bm_gaussian_draw)->Args({100, 10})->Args({1000, 31});

void bm_sample_ma_process(benchmark::State& state) {
  const std::size_t p = std::size_t(state.range(0));
  const tcov::MaSpec spec{p, 0.6};
  tcov::RngStream rng(7, 3);
  for (auto _ : state)
    benchmark::DoNotOptimize(tcov::sample_ma_process(spec, 100, rng));
  state.SetItemsProcessed(state.iterations() * 100 * p);
}
BENCHMARK(bm_sample_ma_process)->Arg(64)->Arg(256)->Arg(1024);

}  // namespace

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include <vector>

#include "oscwave/hermite.hpp"
#include "oscwave/isometry.hpp"
#include "oscwave/kernels.hpp"
#include "oscwave/noise.hpp"

using namespace oscwave;

static void BM_HermiteBatch(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::vector<double> out;
  double x = 0.0;
  for (auto _ : state) {
    hermite::psi_batch(n, x, out);
    benchmark::DoNotOptimize(out.data());
    x += 1e-3;
  }
  state.SetItemsProcessed(state.iterations() * (n + 1));
}
BENCHMARK(BM_HermiteBatch)->Arg(16)->Arg(64)->Arg(1024);

static void BM_KernelF1(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  double xi = -20.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernel_f1(1.0, 0.7, xi, n));
    xi += 1e-3;
    if (xi > 20.0) xi = -20.0;
  }
}
BENCHMARK(BM_KernelF1)->Arg(8)->Arg(64);

static void BM_Variance1d(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(variance_1d(1.0, 0.7, static_cast<int>(state.range(0))).value);
  }
}
BENCHMARK(BM_Variance1d)->Arg(64)->Arg(256);

static void BM_Variance2d(benchmark::State& state) {
  const ModelParams p{2, 1.0, 0.0, 0.2};
  const SpectralMeasureSpec spec = compact_measure(-2.0, 2.0, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        variance_2d(1.0, 0.5, 0.0, static_cast<int>(state.range(0)), p, spec).value);
  }
}
BENCHMARK(BM_Variance2d)->Arg(8)->Arg(32);

static void BM_SampleReplicas(benchmark::State& state) {
  const TruncatedKernel k = make_kernel(ModelParams{1, 1.0, 0.0, 0.0}, lebesgue_measure(), 8, 1.0);
  NoiseGridSpec gs;
  gs.lambda_cells = 64;
  const NoiseGrid g = build_noise_grid(k, gs, 1.0 / 64, 64, 7);
  const Probe probes[1] = {{1.0, 0.0, 0.0, 0.0}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        sample_field(k, g, probes, static_cast<int>(state.range(0)), 1).variance[0]);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampleReplicas)->Arg(100)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include "usol/field.hpp"

using namespace usol;

static void BM_Fourier(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Grid g = Grid::cubic(3, n, 16.0);
  SampledField f = SampledField::sample(g, Space::Physical, [](const double* x) {
    return cplx(std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])));
  });
  for (auto _ : state) benchmark::DoNotOptimize(fourier(f));
  state.SetItemsProcessed(state.iterations() * g.size());
}
BENCHMARK(BM_Fourier)->Arg(32)->Arg(64);

static void BM_LorentzNorms(benchmark::State& state) {
  Grid g = Grid::cubic(3, 32, 8.0);
  SampledField f = SampledField::sample(g, Space::Physical, [](const double* x) { return cplx(1.0 / (1.0 + x[0] * x[0])); });
  for (auto _ : state) {
    benchmark::DoNotOptimize(lorentz_p1(f, 1.5));
    benchmark::DoNotOptimize(lorentz_qinf(f, 6.0));
  }
}
BENCHMARK(BM_LorentzNorms);
BENCHMARK_MAIN();

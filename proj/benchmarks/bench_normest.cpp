#include <benchmark/benchmark.h>

#include "usol/normest.hpp"

using namespace usol;

static void BM_ResolventPowerIteration(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Grid g = Grid::cubic(3, n, 16.0);
  QuadraticForm f(3, 1);
  ExponentPair F = vertex(3, 'F');
  NormProbe p;
  p.p = F.p();
  p.q = F.q();
  p.iterations = 10;
  LinearOperator T = resolvent_operator(g, f, {0.6, 0.8});
  for (auto _ : state) benchmark::DoNotOptimize(opnorm_lower(T, p));
}
BENCHMARK(BM_ResolventPowerIteration)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include "usol/multipliers.hpp"
#include "usol/surface_ops.hpp"

using namespace usol;

static void BM_KernelK(benchmark::State& state) {
  const double lam = std::ldexp(1.0, -static_cast<int>(state.range(0)));
  LocalizedMultiplier lm{lam, MChoice::ConstantOne, build_pv_psi(BumpKit::standard()),
                         GraphChart(QuadraticForm(3, 1), 1.0)};
  RealVec et{1.5, 0.0}, g(2);
  lm.chart.gradient(et.data(), g.data());
  const double xd = 1.0 / lam;
  RealVec x{-xd * g[0], -xd * g[1], xd};
  for (auto _ : state) benchmark::DoNotOptimize(kernel_K(lm, x));
}
BENCHMARK(BM_KernelK)->Arg(3)->Arg(5)->Arg(7)->Unit(benchmark::kMillisecond);

static void BM_OscillatoryI(benchmark::State& state) {
  GraphChart ch(QuadraticForm(3, 1), 1.0);
  const double xd = static_cast<double>(state.range(0));
  RealVec et{1.5, 0.0}, g(2);
  ch.gradient(et.data(), g.data());
  RealVec x{-xd * g[0], -xd * g[1], xd};
  for (auto _ : state) benchmark::DoNotOptimize(oscillatory_I(x, ch));
}
BENCHMARK(BM_OscillatoryI)->Arg(10)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_PolarGaussian(benchmark::State& state) {
  QuadraticForm f(3, 1);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        polar_integrate([](const double* x) { return std::exp(-kPi * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2])); }, f));
}
BENCHMARK(BM_PolarGaussian)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();

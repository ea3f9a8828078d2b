#include <benchmark/benchmark.h>

#include <memory>

#include "near_misses/bootstrap.hpp"
#include "near_misses/counting.hpp"
#include "near_misses/experiments.hpp"
#include "near_misses/kernels.hpp"
#include "near_misses/oscillatory.hpp"

using namespace near_misses;

static void BM_CountNearParaboloid(benchmark::State& state) {
  const MongeChart c = paraboloid(3);
  CountQuery q;
  q.Q = state.range(0);
  q.delta = 0.05;
  q.mode = CountMode::kWeighted;
  q.weight = std::make_shared<BumpWeight>(std::vector<double>{0.5, 0.5}, 0.375);
  q.keep_per_q = false;
  q.threads = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(count_near(c, q).total);
  state.SetItemsProcessed(state.iterations() * q.Q * q.Q * q.Q / 2);
}
BENCHMARK(BM_CountNearParaboloid)->Args({100, 1})->Args({200, 1})->Args({200, 4})->Unit(benchmark::kMillisecond);

static void BM_CountOnParabola(benchmark::State& state) {
  const MongeChart c = parabola();
  for (auto _ : state) benchmark::DoNotOptimize(count_on(c, state.range(0)).count);
}
BENCHMARK(BM_CountOnParabola)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_OscillatoryQuadrature(benchmark::State& state) {
  const MongeChart c = paraboloid(3);
  const BumpWeight w({0.5, 0.5}, 0.3);
  OscillatoryQuery q;
  q.j = 2;
  q.k = {1, 1};
  q.q = state.range(0);
  q.quad_tol = 1e-12;
  for (auto _ : state) benchmark::DoNotOptimize(integral_quadrature(c, w, q).value);
}
BENCHMARK(BM_OscillatoryQuadrature)->Arg(50)->Arg(500)->Unit(benchmark::kMillisecond);

static void BM_ExponentSequence(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(exponent_sequence(3, state.range(0)).betas.size());
}
BENCHMARK(BM_ExponentSequence)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_SelbergValidate(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(validate_selberg(SelbergPair(state.range(0), -0.1, 0.1)).ok);
}
BENCHMARK(BM_SelbergValidate)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

static void BM_RobertSargos(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(robert_sargos_count(state.range(0), 0.1, 1.5));
}
BENCHMARK(BM_RobertSargos)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

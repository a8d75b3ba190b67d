// Serial reference vs OpenMP kernels. SLICELAB_THREADS caps the parallel side.

#include <benchmark/benchmark.h>

#include <cmath>

#include "slicelab/harmonic.hpp"
#include "slicelab/measures.hpp"
#include "slicelab/noise.hpp"
#include "slicelab/parallel.hpp"

using namespace slicelab;

namespace {

SliceFunction majority_table(int n, int k) {
  return SliceFunction::from_callable(n, k, [](Mask x) {
    return Rational(std::popcount(x & 0x1F) >= 3 ? 1 : -1);
  });
}

void expansion(benchmark::State& state, Exec exec) {
  const int n = static_cast<int>(state.range(0));
  const SliceFunction f = majority_table(n, n / 2);
  for (auto _ : state) benchmark::DoNotOptimize(harmonic_expansion(f, exec));
  state.counters["threads"] = exec == Exec::parallel ? worker_count() : 1;
}

void monte_carlo(benchmark::State& state, bool parallel) {
  const int n = static_cast<int>(state.range(0));
  const MeasureSpec m = gaussian_measure(Rational(1, 2));
  auto g = [](std::span<const double> x) {
    double acc = 0;
    for (double v : x) acc += v;
    return std::tanh(acc);
  };
  for (auto _ : state) benchmark::DoNotOptimize(monte_carlo_mean(m, n, 200000, 7, g, 1 << 14, parallel));
  state.SetItemsProcessed(state.iterations() * 200000);
}

void stability_pairs(benchmark::State& state, bool parallel) {
  const int n = static_cast<int>(state.range(0));
  RealPoly f(static_cast<std::size_t>(n));
  f.add_term({0}, 1.0);
  f.add_term({1}, -1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(stability_monte_carlo(f, 0.5, slice_measure(n, n / 2), 100000, 3, parallel));
  }
}

}  // namespace

BENCHMARK_CAPTURE(expansion, serial, Exec::serial)->Arg(10)->Arg(12)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(expansion, parallel, Exec::parallel)->Arg(10)->Arg(12)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(monte_carlo, serial, false)->Arg(64)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(monte_carlo, parallel, true)->Arg(64)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(stability_pairs, serial, false)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(stability_pairs, parallel, true)->Arg(32)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

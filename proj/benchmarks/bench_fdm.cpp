#include <benchmark/benchmark.h>

#include "srbf/fdm.hpp"

namespace {

void BM_Solve2d(benchmark::State& state) {
  const srbf::MultiscaleProblem problem = srbf::builtin(5, 0.1);
  const double h = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(srbf::solve_2d(problem, h));
}

void BM_Solve1d(benchmark::State& state) {
  const srbf::MultiscaleProblem problem = srbf::builtin(1, 0.01);
  for (auto _ : state) benchmark::DoNotOptimize(srbf::solve_1d(problem, 1e-4));
}

}  // namespace

BENCHMARK(BM_Solve2d)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Solve1d)->Unit(benchmark::kMillisecond);

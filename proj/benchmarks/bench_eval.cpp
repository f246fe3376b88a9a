#include <benchmark/benchmark.h>

#include "srbf/rbf.hpp"
#include "srbf/sampling.hpp"

namespace {

void BM_EvalBatch(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const auto units = static_cast<std::size_t>(state.range(1));
  srbf::Rng rng = srbf::make_rng(1, 1);
  const srbf::RbfNetwork net = srbf::init_network(units, dim, 0.1, rng);
  const srbf::PointSet pts = srbf::sample_interior_random(dim, 4096, rng);
  for (auto _ : state) benchmark::DoNotOptimize(srbf::eval(net, pts));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(pts.size() * units));
}

}  // namespace

BENCHMARK(BM_EvalBatch)->Args({1, 100})->Args({2, 1000})->Args({3, 2000})->Unit(benchmark::kMillisecond);

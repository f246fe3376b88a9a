#include <benchmark/benchmark.h>

#include <vector>

#include "srbf/loss.hpp"
#include "srbf/problem.hpp"
#include "srbf/sampling.hpp"

namespace {

// One minibatch of the mixed loss with gradients; items are unit evaluations.
void BM_LossGrads(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const auto units = static_cast<std::size_t>(state.range(1));
  const int example = dim == 1 ? 1 : (dim == 2 ? 5 : 8);
  const srbf::MultiscaleProblem problem = srbf::builtin(example, 0.1);
  srbf::Rng rng = srbf::make_rng(1, 1);
  std::vector<srbf::RbfNetwork> nets;
  for (int k = 0; k <= dim; ++k) nets.push_back(srbf::init_network(units, dim, 0.1, rng));
  const auto interior = srbf::tabulate_interior(problem, srbf::sample_interior_random(dim, 2048, rng));
  const auto boundary = srbf::tabulate_boundary(problem, srbf::sample_boundary(dim, 64));
  const srbf::LossWeights weights{1.0, 100.0, 1e-3};
  for (auto _ : state) benchmark::DoNotOptimize(srbf::loss_grads(nets, interior.view(), boundary.view(), weights));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(2048 * units * (dim + 1)));
}

}  // namespace

BENCHMARK(BM_LossGrads)->Args({1, 200})->Args({2, 1000})->Args({3, 2000})->Unit(benchmark::kMillisecond);

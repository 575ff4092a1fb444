#include <benchmark/benchmark.h>

#include "lipfm/experiments.hpp"
#include "lipfm/random_features.hpp"

using namespace lipfm;

namespace {

RandomFeatureMap rff_map(int dim, std::size_t n) {
  return build_feature_map(WeightDistribution::isotropic_gaussian(1.0, dim),
                           BiasDistribution::uniform_phase(), Activation::scaled_cosine(1.0), n, 1);
}

std::vector<Eigen::VectorXd> grid_for(int dim) {
  return dim == 1 ? default_grid_1d() : lattice_grid(-1.0, 1.0, 10, dim);
}

void BM_EmpiricalReference(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const auto fm = rff_map(dim, static_cast<std::size_t>(state.range(1)));
  const auto grid = grid_for(dim);
  for (auto _ : state) benchmark::DoNotOptimize(empirical_lipschitz_reference(fm, grid).value);
}

void BM_EmpiricalFast(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const auto fm = rff_map(dim, static_cast<std::size_t>(state.range(1)));
  const auto grid = grid_for(dim);
  for (auto _ : state) benchmark::DoNotOptimize(empirical_lipschitz(fm, grid).value);
}

void BM_EmpiricalParallel(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const auto fm = rff_map(dim, static_cast<std::size_t>(state.range(1)));
  const auto grid = grid_for(dim);
  for (auto _ : state) benchmark::DoNotOptimize(empirical_lipschitz(fm, grid, true).value);
}

QuantileSweepConfig sweep_config(int threads) {
  return {.features = rff_features(ShiftInvariantKernel::gaussian_isotropic(1.0, 1)),
          .n_list = {16, 64, 256},
          .realizations = 100,
          .delta = 0.9,
          .grid = default_grid_1d(),
          .seed = 0,
          .lip_reference = 1.0,
          .threads = threads};
}

void BM_SweepReference(benchmark::State& state) {
  const auto cfg = sweep_config(1);
  for (auto _ : state) benchmark::DoNotOptimize(quantile_sweep_reference(cfg));
}

void BM_Sweep(benchmark::State& state) {
  const auto cfg = sweep_config(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(quantile_sweep(cfg));
}

}  // namespace

BENCHMARK(BM_EmpiricalReference)->Args({1, 1024})->Args({3, 256})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_EmpiricalFast)->Args({1, 1024})->Args({3, 256})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_EmpiricalParallel)->Args({1, 1024})->Args({3, 256})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_SweepReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Sweep)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

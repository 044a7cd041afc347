#include <benchmark/benchmark.h>

#include "reflsolve/experiments.hpp"
#include "reflsolve/linalg.hpp"
#include "reflsolve/reflection.hpp"
#include "reflsolve/sphere.hpp"

namespace {

using namespace reflsolve;

LinearSystem bench_system(std::size_t n) {
  RngStream rng(1);
  DenseMatrix a = gen_gaussian_row_normalized(n, rng);
  return LinearSystem::from_solution(std::move(a), rng.normal_vector(n));
}

void BM_ReflectionSteps(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const LinearSystem system = bench_system(n);
  const RowSampler sampler(system);
  RngStream rng(2);
  Vector x(n, 0.0);
  for (auto _ : state) {
    const std::size_t i = sampler.sample(rng);
    reflect_in_place(x, system.matrix().row(i), system.rhs()[i], system.row_squared_norm(i));
    benchmark::DoNotOptimize(x.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ReflectionSteps)->Arg(20)->Arg(50)->Arg(200);

void BM_RowSampler(benchmark::State& state) {
  const LinearSystem system = bench_system(static_cast<std::size_t>(state.range(0)));
  const RowSampler sampler(system);
  RngStream rng(3);
  for (auto _ : state) benchmark::DoNotOptimize(sampler.sample(rng));
}
BENCHMARK(BM_RowSampler)->Arg(50)->Arg(1000);

void BM_JacobiSvd(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  RngStream rng(4);
  const DenseMatrix a = gen_gaussian_row_normalized(n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(singular_values(a).smallest());
}
BENCHMARK(BM_JacobiSvd)->Arg(10)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_ThalesCenter(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const LinearSystem system = bench_system(n);
  RngStream rng(5);
  const ReflectionTrace trace = run_reflections(system, Vector(n, 0.0), 100 * n, 25, rng);
  const PointCloud cloud(std::vector<Vector>(trace.points.begin() + 1, trace.points.end()));
  for (auto _ : state) benchmark::DoNotOptimize(center_via_thales(cloud));
}
BENCHMARK(BM_ThalesCenter)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

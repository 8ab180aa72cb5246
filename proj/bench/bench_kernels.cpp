#include <benchmark/benchmark.h>

#include <omp.h>

#include "aoi/eval.hpp"
#include "aoi/exact_solver.hpp"

using namespace aoi;

namespace {

ModelConfig paper(double eta) {
  ModelConfig c;
  c.update_weight = eta;
  return c;
}

ModelConfig tiny() {
  ModelConfig c;
  c.window = 2;
  c.aoi_cap = 2;
  c.users = {1};
  c.update_weight = 0.5;
  return c;
}

void BM_RviaParallel(benchmark::State& state) {
  omp_set_num_threads(static_cast<int>(state.range(0)));
  const IndexedKernel k(paper(2.0));
  for (auto _ : state) benchmark::DoNotOptimize(rvia(k).avg_cost);
}

void BM_RviaSerial(benchmark::State& state) {
  const auto c = paper(2.0);
  for (auto _ : state) benchmark::DoNotOptimize(serial::rvia(c).avg_cost);
}

void BM_OracleParallel(benchmark::State& state) {
  omp_set_num_threads(static_cast<int>(state.range(0)));
  const auto c = tiny();
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_policies_oracle(c).best.avg_cost);
}

void BM_OracleSerial(benchmark::State& state) {
  const auto c = tiny();
  for (auto _ : state) benchmark::DoNotOptimize(serial::enumerate_policies_oracle(c).best.avg_cost);
}

void BM_Sweep(benchmark::State& state) {
  const std::vector<PolicyKind> kinds{optimal_policy_kind(), baseline_policy_kind()};
  const std::vector<double> grid{0.5, 2.0, 8.0};
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < 8; ++i) seeds.push_back(derive_seed(1, i));
  const SweepSettings settings{5000, 100, static_cast<int>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(sweep(kinds, grid, paper(0.0), seeds, settings).rows.size());
}

}  // namespace

BENCHMARK(BM_RviaSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RviaParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OracleSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OracleParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Sweep)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

// Serial reference vs OpenMP kernel for each parallel entry point.
#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "macpower/gaussian_info.hpp"
#include "macpower/model.hpp"
#include "macpower/sweep.hpp"
#include "macpower/verify.hpp"

using namespace macpower;

namespace {

Exec exec_of(const benchmark::State& state) {
  return state.range(0) == 0 ? Exec::Serial : Exec::Parallel;
}

NetworkConfig ladder(std::size_t l) {
  std::vector<double> g(l), n(l);
  for (std::size_t i = 0; i < l; ++i) {
    g[i] = 0.5 + 0.1 * static_cast<double>(i);
    n[i] = 0.3 + 0.05 * static_cast<double>(i % 7);
  }
  return make_network(1.0, 1.0, g, n);
}

void BM_CheckFeasible(benchmark::State& state) {
  const auto l = static_cast<std::size_t>(state.range(1));
  const NetworkConfig cfg = ladder(l);
  const std::vector<double> p(l, 2.0), r(l, 0.3);
  for (auto _ : state)
    benchmark::DoNotOptimize(check_feasible(cfg, p, r, 0.5, CodingScheme::Separate, exec_of(state)));
  state.SetComplexityN(static_cast<std::int64_t>(1) << l);
}
BENCHMARK(BM_CheckFeasible)
    ->ArgNames({"parallel", "L"})
    ->ArgsProduct({{0, 1}, {12, 16, 18}})
    ->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_SimulateUncoded(benchmark::State& state) {
  const NetworkConfig cfg = make_network(1.0, 1.0, {1.0, 2.0, 0.5}, {0.5, 1.0, 2.0});
  const std::vector<double> p{1.0, 0.7, 1.5};
  for (auto _ : state)
    benchmark::DoNotOptimize(simulate_uncoded(cfg, p, state.range(1), 7, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * state.range(1));
}
BENCHMARK(BM_SimulateUncoded)
    ->ArgNames({"parallel", "n"})
    ->ArgsProduct({{0, 1}, {1 << 20, 1 << 22}})
    ->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_GridOracle(benchmark::State& state) {
  const NetworkConfig cfg = make_network(1.0, 1.0, {1.0, 2.0}, {0.5, 1.0});
  GridSpec spec;
  spec.rate_points = 41;
  spec.power_points = 41;
  const auto scheme = static_cast<Scheme>(state.range(1));
  for (auto _ : state)
    benchmark::DoNotOptimize(grid_oracle(cfg, 0.45, scheme, spec, exec_of(state)));
}
BENCHMARK(BM_GridOracle)
    ->ArgNames({"parallel", "scheme"})
    ->ArgsProduct({{0, 1}, {static_cast<long>(Scheme::Uncoded), static_cast<long>(Scheme::SSCC)}})
    ->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_Sweep(benchmark::State& state) {
  SweepSpec spec;
  spec.d = 0.1;
  for (auto _ : state) benchmark::DoNotOptimize(run_sweep(spec, exec_of(state)));
}
BENCHMARK(BM_Sweep)->ArgNames({"parallel"})->Arg(0)->Arg(1)->UseRealTime()->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include "toric/fiber.hpp"
#include "toric/metropolis.hpp"
#include "toric/mle.hpp"
#include "toric/presets.hpp"
#include "toric/sampler.hpp"

using namespace toric;

namespace {

void BM_FiberEnumeration(benchmark::State& state) {
  const auto p = preset("no3way-2x3x3", state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_fiber(p.model.matrix(), p.b).size());
}
BENCHMARK(BM_FiberEnumeration)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_ZValue(benchmark::State& state) {
  const auto p = preset("quasi-3x3", state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(z_value(p.model, p.b).term_count);
}
BENCHMARK(BM_ZValue)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_IpsSolve(benchmark::State& state) {
  const auto p = preset(state.range(0) == 0 ? "nonindep-4x5" : "no3way-2x3x3", 1);
  const auto n = degree(p.model.matrix(), p.b);
  const IpsConfig config{0.005, 100000};
  int iterations = 0;
  for (auto _ : state) {
    const auto r = ips_solve(p.model, p.b, n, config);
    iterations = r.iterations;
    benchmark::DoNotOptimize(r.mu_hat.data());
  }
  state.counters["iterations"] = iterations;
}
BENCHMARK(BM_IpsSolve)->Arg(0)->Arg(1);

// Per-table cost with a warm kernel cache, the steady state of a long run.
void BM_DirectDraw(benchmark::State& state) {
  const char* names[] = {"indep-4x5", "nonindep-4x5", "no3way-2x3x3", "quasi-3x3"};
  const auto p = preset(names[state.range(0)], 1);
  const TransitionKernel kernel(p.model, p.estimator);
  std::uint64_t seed = 0;
  for (int k = 0; k < 200; ++k) draw_table(kernel, p.b, seed++);
  for (auto _ : state) benchmark::DoNotOptimize(draw_table(kernel, p.b, seed++).table.total());
  state.SetLabel(names[state.range(0)]);
}
BENCHMARK(BM_DirectDraw)->DenseRange(0, 3)->Unit(benchmark::kMicrosecond);

void BM_MetropolisSteps(benchmark::State& state) {
  const auto p = preset(state.range(0) == 0 ? "indep-4x5" : "no3way-2x3x3", 1);
  ChainConfig config;
  config.length = 10'000;
  config.initial_table = p.initial_table;
  for (auto _ : state) {
    config.seed++;
    benchmark::DoNotOptimize(run_chain(p.model, config, *p.basis).acceptances);
  }
  state.SetItemsProcessed(state.iterations() * config.length);
}
BENCHMARK(BM_MetropolisSteps)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

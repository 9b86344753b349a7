#include <benchmark/benchmark.h>

#include "symham/qma.hpp"
#include "symham/tchain.hpp"

using namespace symham;

static void BM_BuildRing31(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(tchain::build_ht(m));
}
BENCHMARK(BM_BuildRing31)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_BuildRing49(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(qma::build_extended_ht(m));
}
BENCHMARK(BM_BuildRing49)->Arg(3)->Unit(benchmark::kMillisecond);

static void BM_ClockPath(benchmark::State& state) {
  using globalprog::CommandKind;
  const std::vector<CommandKind> tape(static_cast<size_t>(state.range(0)), CommandKind::G);
  const int n_data = (tape.size() % 2 == 0) ? 2 : 3;
  const auto init = tchain::initial_configuration(tape, std::vector<int>(n_data, 0));
  for (auto _ : state) benchmark::DoNotOptimize(tchain::reachable_clock_path(init));
}
BENCHMARK(BM_ClockPath)->Arg(1)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);

#include <benchmark/benchmark.h>

#include "symham/flagpattern.hpp"

using namespace symham;

static void BM_SuppressionSweep(benchmark::State& state) {
  const auto layout = flagpat::default_flag_layout();
  for (auto _ : state) benchmark::DoNotOptimize(flagpat::verify_suppression(layout));
}
BENCHMARK(BM_SuppressionSweep)->Unit(benchmark::kMillisecond);

#include <benchmark/benchmark.h>

#include "symham/evolve.hpp"
#include "symham/xxchain.hpp"

using namespace symham;

static void BM_EvolveDense(benchmark::State& state) {
  const int L = static_cast<int>(state.range(0));
  const SparseOperator h = xxchain::hopping_operator({L, 1.0});
  std::mt19937_64 rng(1);
  const ComplexVector v = random_state(L, rng);
  for (auto _ : state) benchmark::DoNotOptimize(evolve(h, v, 2.5, EvolveMethod::Dense));
}
BENCHMARK(BM_EvolveDense)->Arg(64)->Arg(256)->Arg(1024);

static void BM_EvolveKrylov(benchmark::State& state) {
  const int L = static_cast<int>(state.range(0));
  const SparseOperator h = xxchain::hopping_operator({L, 1.0});
  std::mt19937_64 rng(1);
  const ComplexVector v = random_state(L, rng);
  for (auto _ : state) benchmark::DoNotOptimize(evolve(h, v, 2.5, EvolveMethod::Krylov));
}
BENCHMARK(BM_EvolveKrylov)->Arg(1024)->Arg(4096)->Arg(16384);

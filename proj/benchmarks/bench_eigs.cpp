#include <benchmark/benchmark.h>

#include "symham/eigs.hpp"
#include "symham/xxchain.hpp"

using namespace symham;

static void BM_SmallestEig(benchmark::State& state) {
  const int L = static_cast<int>(state.range(0));
  std::vector<Triplet> t;
  for (Index i = 0; i + 1 < L; ++i) {
    t.push_back({i, i + 1, 1.0});
    t.push_back({i + 1, i, 1.0});
  }
  t.push_back({0, 0, -3.0});  // isolated bound state keeps the iteration honest
  const SparseOperator h = SparseOperator::from_triplets(L, std::move(t));
  for (auto _ : state)
    benchmark::DoNotOptimize(extremal_eigs(h, Which::Smallest, 1, 1e-10));
}
BENCHMARK(BM_SmallestEig)->Arg(1024)->Arg(8192)->Arg(65536);

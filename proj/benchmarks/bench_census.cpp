#include <benchmark/benchmark.h>

#include "csg/cycle_census.hpp"
#include "csg/eval.hpp"
#include "csg/signed_graph.hpp"

namespace {

csg::SignedGraph bench_graph(std::size_t n) {
  return csg::synth_benchmark(n, 2, 0.05, 0.02, 0.1, 7);
}

void BM_EnumerateTriangles(benchmark::State& state) {
  const csg::SignedGraph g = bench_graph(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(csg::enumerate_triangles(g));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(g.edges().size()));
}
BENCHMARK(BM_EnumerateTriangles)->Arg(200)->Arg(500)->Arg(1000);

void BM_DifficultyScores(benchmark::State& state) {
  const csg::SignedGraph g = bench_graph(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(csg::difficulty_scores(g));
  }
}
BENCHMARK(BM_DifficultyScores)->Arg(200)->Arg(500)->Arg(1000);

void BM_CensusUpTo(benchmark::State& state) {
  const csg::SignedGraph g = bench_graph(120);
  const int max_n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(csg::census(g, max_n, 1));
  }
}
BENCHMARK(BM_CensusUpTo)->Arg(3)->Arg(4)->Arg(5)->Arg(6);

void BM_CensusThreads(benchmark::State& state) {
  const csg::SignedGraph g = bench_graph(150);
  const auto threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(csg::census(g, 5, threads));
  }
}
BENCHMARK(BM_CensusThreads)->Arg(1)->Arg(2)->Arg(4);

}  // namespace

BENCHMARK_MAIN();

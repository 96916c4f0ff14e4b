#include <benchmark/benchmark.h>

#include <vector>

#include "csg/eval.hpp"
#include "csg/sgnn.hpp"
#include "csg/signed_graph.hpp"
#include "csg/tensor.hpp"

namespace {

struct Setup {
  csg::SignedGraph graph;
  csg::Matrix features;
  csg::SgnnModel model;
  std::vector<csg::SignedEdge> batch;
};

Setup make_setup(std::size_t n, std::size_t feature_dim, std::size_t hidden_dim) {
  Setup s{csg::synth_benchmark(n, 2, 0.05, 0.02, 0.1, 7), {}, {}, {}};
  s.features = csg::init_features(s.graph.node_count(), feature_dim, 11);
  s.model = csg::init_model(feature_dim, hidden_dim, 12);
  s.batch.assign(s.graph.edges().begin(), s.graph.edges().end());
  return s;
}

void BM_Forward(benchmark::State& state) {
  const Setup s = make_setup(static_cast<std::size_t>(state.range(0)), 64, 32);
  for (auto _ : state) {
    benchmark::DoNotOptimize(csg::forward(s.model, s.graph, s.features));
  }
}
BENCHMARK(BM_Forward)->Arg(200)->Arg(500);

void BM_ComputeGradients(benchmark::State& state) {
  const Setup s = make_setup(static_cast<std::size_t>(state.range(0)), 64, 32);
  csg::SgnnGradients grads(s.model);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        csg::compute_gradients(s.model, s.graph, s.features, s.batch, grads));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(s.batch.size()));
}
BENCHMARK(BM_ComputeGradients)->Arg(200)->Arg(500);

void BM_TrainEpochs(benchmark::State& state) {
  const csg::SignedGraph g = csg::synth_benchmark(200, 2, 0.05, 0.02, 0.1, 7);
  csg::TrainOptions options;
  options.feature_dim = 32;
  options.hidden_dim = 16;
  options.epochs = static_cast<std::int64_t>(state.range(0));
  const std::vector<csg::SignedEdge> batch(g.edges().begin(), g.edges().end());
  for (auto _ : state) {
    benchmark::DoNotOptimize(csg::train_baseline(g, batch, {}, options));
  }
}
BENCHMARK(BM_TrainEpochs)->Arg(5)->Arg(20);

}  // namespace

#include <benchmark/benchmark.h>

#include "tpcgcn/data/dataset.hpp"
#include "tpcgcn/data/synthetic.hpp"
#include "tpcgcn/graph/adjacency.hpp"
#include "tpcgcn/model/batch.hpp"
#include "tpcgcn/model/dtpcgcn.hpp"
#include "tpcgcn/model/tpcgcn.hpp"
#include "tpcgcn/tensor/ops.hpp"

using namespace tpcgcn;

namespace {

// One topic graph with the given post count, 5 comments per post.
struct Fixture {
  data::Corpus corpus;
  data::EmbeddingTable emb;
  model::GraphBatch batch;
  std::vector<std::size_t> rows;

  Fixture(std::size_t posts, std::size_t dim) {
    data::SyntheticSpec spec;
    spec.topics = 1;
    spec.posts_per_topic = posts;
    spec.comments_per_post = 5;
    spec.dim = dim;
    const auto ds = data::make_synthetic(spec);
    corpus = data::make_corpus(ds.records);
    emb = ds.embeddings;
    batch = model::make_batch(corpus.graphs[0], emb, corpus.labels);
    rows.resize(batch.post_ids.size());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  }
};

void BM_NormalizeAdjacency(benchmark::State& state) {
  const Fixture f(static_cast<std::size_t>(state.range(0)), 8);
  for (auto _ : state) benchmark::DoNotOptimize(graph::normalize_adjacency(f.corpus.graphs[0]));
  state.SetItemsProcessed(state.iterations() * f.corpus.graphs[0].node_count());
}
BENCHMARK(BM_NormalizeAdjacency)->Arg(50)->Arg(500)->Arg(5000);

void BM_Spmm(benchmark::State& state) {
  const Fixture f(static_cast<std::size_t>(state.range(0)), 8);
  tensor::SeededRng rng(1);
  tensor::Matrix h(f.batch.features.rows(), 100);
  for (auto& v : h.data()) v = rng.normal();
  for (auto _ : state) benchmark::DoNotOptimize(tensor::spmm(f.batch.adjacency, h));
  state.SetItemsProcessed(state.iterations() * f.batch.adjacency.nnz());
}
BENCHMARK(BM_Spmm)->Arg(50)->Arg(500)->Arg(5000);

void BM_TpcForwardBackward(benchmark::State& state) {
  const Fixture f(static_cast<std::size_t>(state.range(0)), 768);
  model::TpcGcnModel m({768, 300, 100, 2});
  m.init(3);
  auto params = m.parameters();
  for (auto _ : state) {
    tensor::SeededRng rng(4);
    const auto fwd = model::tpcgcn_forward(f.batch, m, rng, true);
    const auto loss = model::masked_cross_entropy(fwd.logits, f.rows, f.batch.labels);
    tensor::zero_grads(params);
    model::tpcgcn_backward(f.batch, m, fwd, loss.grad);
    benchmark::ClobberMemory();
  }
}
BENCHMARK(BM_TpcForwardBackward)->Arg(20)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_DtpcForward(benchmark::State& state) {
  const Fixture f(static_cast<std::size_t>(state.range(0)), 768);
  model::DtpcGcnModel m({768, 300, 32, 16, 2, 2}, 16);
  m.init(5);
  for (auto _ : state) {
    tensor::SeededRng rng(6);
    benchmark::DoNotOptimize(model::dtpcgcn_forward(f.batch, m, rng, false).logits);
  }
}
BENCHMARK(BM_DtpcForward)->Arg(20)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

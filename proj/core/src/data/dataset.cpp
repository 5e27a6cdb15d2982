#include "tpcgcn/data/dataset.hpp"

#include "tpcgcn/data/threads_io.hpp"

namespace tpcgcn::data {

std::vector<ThreadRecord> prepare_threads(const std::vector<ThreadRecord>& records,
                                          const PrepOptions& options) {
  std::vector<ThreadRecord> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    ThreadRecord t = options.rebuild_replies ? graph::with_rebuilt_replies(r) : r;
    if (options.truncation.max_count || options.truncation.window_seconds)
      t = graph::truncate_comments(t, options.truncation);
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<graph::TpcGraph> build_topic_graphs(const std::vector<ThreadRecord>& records) {
  std::vector<graph::TpcGraph> graphs;
  for (const auto& [topic, threads] : group_by_topic(records))
    graphs.push_back(graph::build_tpc_graph(topic, threads));
  return graphs;
}

Corpus make_corpus(const std::vector<ThreadRecord>& records) {
  Corpus c;
  c.graphs = build_topic_graphs(records);
  for (const auto& r : records) c.labels[r.post_id] = r.label;
  return c;
}

EmbeddingTable fallback_embeddings(const std::vector<ThreadRecord>& records, std::size_t dim,
                                   std::uint64_t seed) {
  EmbeddingTable table(dim);
  for (const auto& r : records) {
    if (!table.contains(r.topic_id))
      table.insert(r.topic_id, hashed_bow_embed(r.topic_id, dim, seed));
    table.insert(r.post_id, hashed_bow_embed(r.text, dim, seed));
    for (const auto& c : r.comments) table.insert(c.id, hashed_bow_embed(c.text, dim, seed));
  }
  return table;
}

}  // namespace tpcgcn::data

#pragma once

// Shared test fixtures and independent reference implementations.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "tpcgcn/data/embeddings.hpp"
#include "tpcgcn/data/split.hpp"
#include "tpcgcn/data/thread_record.hpp"
#include "tpcgcn/graph/tpc_graph.hpp"
#include "tpcgcn/tensor/matrix.hpp"
#include "tpcgcn/tensor/rng.hpp"

namespace tpcgcn::testkit {

// One topic with `posts` posts and `nodes` total nodes (topic included);
// every comment replies to a uniformly chosen earlier node of its thread.
inline std::vector<data::ThreadRecord> random_thread_set(std::size_t nodes, std::size_t posts,
                                                         tensor::SeededRng& rng,
                                                         const std::string& topic = "t") {
  std::vector<data::ThreadRecord> recs(posts);
  for (std::size_t p = 0; p < posts; ++p) {
    recs[p].post_id = topic + "p" + std::to_string(p);
    recs[p].topic_id = topic;
    recs[p].label = static_cast<int>(p % 2);
    recs[p].text = "post " + std::to_string(p);
  }
  const std::size_t comments = nodes > posts + 1 ? nodes - posts - 1 : 0;
  for (std::size_t c = 0; c < comments; ++c) {
    auto& r = recs[rng.uniform_index(posts)];
    data::CommentRecord cm;
    cm.id = topic + "c" + std::to_string(c);
    cm.author = "u" + std::to_string(c % 5);
    cm.text = "comment " + std::to_string(c);
    cm.created_at = static_cast<std::int64_t>(c);
    const auto k = rng.uniform_index(r.comments.size() + 1);
    if (k < r.comments.size()) cm.parent_id = r.comments[k].id;
    r.comments.push_back(cm);
  }
  return recs;
}

// Dense D^-1/2 (A + I) D^-1/2 straight from the edge list.
inline tensor::Matrix dense_normalized_adjacency(const graph::TpcGraph& g) {
  const std::size_t n = g.node_count();
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) a[i][i] = 1.0;
  for (const auto& e : g.edges) {
    a[e.a][e.b] = 1.0;
    a[e.b][e.a] = 1.0;
  }
  std::vector<double> d(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) d[i] += a[i][j];
  tensor::Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out(i, j) = a[i][j] / std::sqrt(d[i] * d[j]);
  return out;
}

// Confusion-matrix-free reference: every quantity recounted from the raw
// lists for each class.
struct OracleMetrics {
  double p[2], r[2], f1[2];
  double avg_p, avg_r, avg_f1, acc;
};

inline OracleMetrics brute_force_metrics(const std::vector<int>& pred,
                                         const std::vector<int>& truth) {
  OracleMetrics m{};
  for (int c = 0; c < 2; ++c) {
    double tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
      if (pred[i] == c && truth[i] == c) tp += 1;
      if (pred[i] == c && truth[i] != c) fp += 1;
      if (pred[i] != c && truth[i] == c) fn += 1;
    }
    m.p[c] = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    m.r[c] = tp + fn > 0 ? tp / (tp + fn) : 0.0;
    m.f1[c] = 2 * tp + fp + fn > 0 ? 2 * tp / (2 * tp + fp + fn) : 0.0;
  }
  double hits = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i] == truth[i] ? 1 : 0;
  m.acc = hits / static_cast<double>(pred.size());
  m.avg_p = (m.p[0] + m.p[1]) / 2;
  m.avg_r = (m.r[0] + m.r[1]) / 2;
  m.avg_f1 = (m.f1[0] + m.f1[1]) / 2;
  return m;
}

// Gaussian vectors for every node of the records.
inline data::EmbeddingTable random_embeddings(const std::vector<data::ThreadRecord>& recs,
                                              std::size_t dim, std::uint64_t seed) {
  tensor::SeededRng rng(seed);
  data::EmbeddingTable t(dim);
  auto vec = [&] {
    std::vector<float> v(dim);
    for (auto& x : v) x = static_cast<float>(rng.normal());
    return v;
  };
  for (const auto& r : recs) {
    if (!t.contains(r.topic_id)) t.insert(r.topic_id, vec());
    t.insert(r.post_id, vec());
    for (const auto& c : r.comments) t.insert(c.id, vec());
  }
  return t;
}

// Every post in the given fold.
inline data::SplitSpec all_in(const std::vector<data::ThreadRecord>& recs, data::Fold f) {
  data::SplitSpec s;
  for (const auto& r : recs) s.assignment[r.post_id] = f;
  return s;
}

}  // namespace tpcgcn::testkit

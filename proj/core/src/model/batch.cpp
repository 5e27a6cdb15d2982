#include "tpcgcn/model/batch.hpp"

#include "tpcgcn/error.hpp"
#include "tpcgcn/graph/adjacency.hpp"
#include "tpcgcn/tensor/ops.hpp"

namespace tpcgcn::model {

GraphBatch make_batch(const graph::TpcGraph& graph, const data::EmbeddingTable& table,
                      const std::map<std::string, int>& labels) {
  GraphBatch b;
  b.topic = graph.topic;
  b.adjacency = graph::normalize_adjacency(graph);
  const std::size_t n = graph.node_count();
  b.features = Matrix(n, table.dim());
  for (std::size_t i = 0; i < n; ++i) {
    const auto& id = graph.nodes[i].id;
    if (!table.contains(id)) {
      throw DataError("no embedding for " + std::string(graph::to_string(graph.nodes[i].kind)) +
                      " node '" + id + "'");
    }
    const auto& v = table.at(id);
    auto row = b.features.row(i);
    for (std::size_t j = 0; j < v.size(); ++j) row[j] = v[j];
  }
  std::vector<std::size_t> post_pos;
  std::vector<std::vector<std::size_t>> comment_pos;
  for (const auto& slot : graph.posts) {
    post_pos.push_back(slot.position);
    comment_pos.push_back(slot.comments);
    const auto& id = graph.nodes[slot.position].id;
    b.post_ids.push_back(id);
    const auto it = labels.find(id);
    b.labels.push_back(it == labels.end() ? -1 : it->second);
  }
  b.groups = make_post_groups(post_pos, comment_pos, n);
  return b;
}

MaskedLoss masked_cross_entropy(const Matrix& logits, std::span<const std::size_t> rows,
                                std::span<const int> labels) {
  if (rows.size() != labels.size()) {
    throw DimensionError("masked_cross_entropy: " + std::to_string(rows.size()) + " rows but " +
                         std::to_string(labels.size()) + " labels");
  }
  const Matrix sub = tensor::gather_rows(logits, rows);
  const auto ce = tensor::softmax_cross_entropy(sub, labels);
  MaskedLoss out;
  out.loss = ce.loss;
  out.grad = Matrix(logits.rows(), logits.cols());
  tensor::scatter_add_rows(out.grad, rows,
                           tensor::softmax_cross_entropy_backward(ce.probs, labels));
  return out;
}

}  // namespace tpcgcn::model

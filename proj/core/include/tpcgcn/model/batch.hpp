#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "tpcgcn/data/embeddings.hpp"
#include "tpcgcn/graph/tpc_graph.hpp"
#include "tpcgcn/model/layers.hpp"
#include "tpcgcn/tensor/sparse.hpp"

namespace tpcgcn::model {

// Everything a forward pass needs for one topic graph.
struct GraphBatch {
  std::string topic;
  tensor::SparseMatrix adjacency;
  Matrix features;  // N x raw_dim, node order of the graph
  PostGroups groups;
  std::vector<std::string> post_ids;
  std::vector<int> labels;  // controversy label per post, -1 if unknown
};

// Throws DataError naming the first node without an embedding.
GraphBatch make_batch(const graph::TpcGraph& graph, const data::EmbeddingTable& table,
                      const std::map<std::string, int>& labels);

struct MaskedLoss {
  double loss = 0.0;
  Matrix grad;  // d loss / d logits, zero outside the selected rows
};

// Mean cross entropy over the selected rows only.
MaskedLoss masked_cross_entropy(const Matrix& logits, std::span<const std::size_t> rows,
                                std::span<const int> labels);

}  // namespace tpcgcn::model

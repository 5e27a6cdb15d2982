#include "tpcgcn/graph/adjacency.hpp"

#include <cmath>

namespace tpcgcn::graph {

tensor::SparseMatrix normalize_adjacency(const TpcGraph& graph) {
  const std::size_t n = graph.node_count();
  std::vector<double> degree(n, 1.0);
  for (const auto& e : graph.edges) {
    degree[e.a] += 1.0;
    degree[e.b] += 1.0;
  }
  std::vector<double> inv_sqrt(n);
  for (std::size_t i = 0; i < n; ++i) inv_sqrt[i] = 1.0 / std::sqrt(degree[i]);

  std::vector<tensor::Triplet> entries;
  entries.reserve(n + 2 * graph.edge_count());
  for (std::size_t i = 0; i < n; ++i) entries.push_back({i, i, inv_sqrt[i] * inv_sqrt[i]});
  for (const auto& e : graph.edges) {
    const double w = inv_sqrt[e.a] * inv_sqrt[e.b];
    entries.push_back({e.a, e.b, w});
    entries.push_back({e.b, e.a, w});
  }
  return tensor::SparseMatrix(n, n, std::move(entries));
}

}  // namespace tpcgcn::graph

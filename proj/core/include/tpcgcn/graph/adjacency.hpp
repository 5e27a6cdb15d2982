#pragma once

#include "tpcgcn/graph/tpc_graph.hpp"
#include "tpcgcn/tensor/sparse.hpp"

namespace tpcgcn::graph {

// D^{-1/2} (A + I) D^{-1/2}, where A is the 0/1 undirected adjacency of the
// graph and D the degree matrix of A + I. Every node has degree >= 1 from its
// self-loop, so isolated nodes map to a diagonal entry of 1.
tensor::SparseMatrix normalize_adjacency(const TpcGraph& graph);

}  // namespace tpcgcn::graph

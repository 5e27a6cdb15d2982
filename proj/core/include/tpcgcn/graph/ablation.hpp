#pragma once

#include <set>
#include <string_view>

#include "tpcgcn/graph/tpc_graph.hpp"

namespace tpcgcn::graph {

enum class AblationVariant {
  Full,
  DropTopic,     // PC-GCN
  DropComments,  // TP-GCN
  RandTopicFeat,
  RandPostFeat,
  RandCommentFeat,
};

std::string_view to_string(AblationVariant v);
AblationVariant parse_ablation_variant(std::string_view s);

// Node-dropping variants remove the nodes and every incident edge; the
// feature-randomizing variants return the graph unchanged.
TpcGraph apply_ablation(const TpcGraph& graph, AblationVariant variant);

// Node kinds whose input features the variant replaces with random vectors.
std::set<NodeKind> randomized_kinds(AblationVariant variant);

// Keeps only the listed node positions (and edges between them), preserving
// relative order. Post slots of removed posts are dropped.
TpcGraph induced_subgraph(const TpcGraph& graph, const std::vector<bool>& keep);

}  // namespace tpcgcn::graph

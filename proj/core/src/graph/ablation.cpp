#include "tpcgcn/graph/ablation.hpp"

#include <limits>
#include <string>

#include "tpcgcn/error.hpp"

namespace tpcgcn::graph {

std::string_view to_string(AblationVariant v) {
  switch (v) {
    case AblationVariant::Full:
      return "full";
    case AblationVariant::DropTopic:
      return "drop-topic";
    case AblationVariant::DropComments:
      return "drop-comments";
    case AblationVariant::RandTopicFeat:
      return "rand-topic";
    case AblationVariant::RandPostFeat:
      return "rand-post";
    case AblationVariant::RandCommentFeat:
      return "rand-comment";
  }
  return "?";
}

AblationVariant parse_ablation_variant(std::string_view s) {
  if (s == "full" || s == "tpc-gcn") return AblationVariant::Full;
  if (s == "drop-topic" || s == "pc-gcn") return AblationVariant::DropTopic;
  if (s == "drop-comments" || s == "tp-gcn") return AblationVariant::DropComments;
  if (s == "rand-topic" || s == "(rt)pc-gcn") return AblationVariant::RandTopicFeat;
  if (s == "rand-post" || s == "t(rp)c-gcn") return AblationVariant::RandPostFeat;
  if (s == "rand-comment" || s == "tp(rc)-gcn") return AblationVariant::RandCommentFeat;
  throw ValidationError("unknown ablation variant '" + std::string(s) + "'");
}

TpcGraph induced_subgraph(const TpcGraph& graph, const std::vector<bool>& keep) {
  constexpr auto kGone = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> remap(graph.node_count(), kGone);
  TpcGraph out;
  out.topic = graph.topic;
  for (std::size_t i = 0; i < graph.node_count(); ++i) {
    if (!keep[i]) continue;
    remap[i] = out.nodes.size();
    out.nodes.push_back(graph.nodes[i]);
  }
  for (const auto& e : graph.edges)
    if (remap[e.a] != kGone && remap[e.b] != kGone) out.edges.push_back({remap[e.a], remap[e.b]});
  for (const auto& slot : graph.posts) {
    if (remap[slot.position] == kGone) continue;
    PostSlot s{remap[slot.position], {}};
    for (auto c : slot.comments)
      if (remap[c] != kGone) s.comments.push_back(remap[c]);
    out.posts.push_back(std::move(s));
  }
  if (graph.topic_position && remap[*graph.topic_position] != kGone)
    out.topic_position = remap[*graph.topic_position];
  return out;
}

TpcGraph apply_ablation(const TpcGraph& graph, AblationVariant variant) {
  NodeKind dropped;
  switch (variant) {
    case AblationVariant::DropTopic:
      dropped = NodeKind::Topic;
      break;
    case AblationVariant::DropComments:
      dropped = NodeKind::Comment;
      break;
    default:
      return graph;
  }
  std::vector<bool> keep(graph.node_count());
  for (std::size_t i = 0; i < graph.node_count(); ++i) keep[i] = graph.nodes[i].kind != dropped;
  return induced_subgraph(graph, keep);
}

std::set<NodeKind> randomized_kinds(AblationVariant variant) {
  switch (variant) {
    case AblationVariant::RandTopicFeat:
      return {NodeKind::Topic};
    case AblationVariant::RandPostFeat:
      return {NodeKind::Post};
    case AblationVariant::RandCommentFeat:
      return {NodeKind::Comment};
    default:
      return {};
  }
}

}  // namespace tpcgcn::graph

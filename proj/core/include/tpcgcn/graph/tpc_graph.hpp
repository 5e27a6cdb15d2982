#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tpcgcn/data/thread_record.hpp"

namespace tpcgcn::graph {

enum class NodeKind { Topic, Post, Comment };

std::string_view to_string(NodeKind kind);
NodeKind parse_node_kind(std::string_view s);

struct Node {
  std::string id;
  NodeKind kind;
};

struct Edge {
  std::size_t a;
  std::size_t b;
  bool operator==(const Edge&) const = default;
};

// A post node and the positions of every comment in its reply tree.
struct PostSlot {
  std::size_t position;
  std::vector<std::size_t> comments;
};

// Topic-post-comment graph: one topic hub, each post joined to the hub, each
// comment joined to the post or comment it replies to. Edges are undirected;
// for tree edges `a` is the parent side.
struct TpcGraph {
  std::string topic;
  std::vector<Node> nodes;
  std::vector<Edge> edges;
  std::vector<PostSlot> posts;
  std::optional<std::size_t> topic_position;

  std::size_t node_count() const { return nodes.size(); }
  std::size_t edge_count() const { return edges.size(); }
  std::optional<std::size_t> find(std::string_view id) const;
  std::vector<std::vector<std::size_t>> adjacency_lists() const;
  std::size_t connected_components() const;
};

// Builds the graph for one topic. Nodes are ordered topic, then for each
// thread its post followed by its comments in listed order. A comment's
// parent must be the post, or a comment listed earlier in the same thread.
TpcGraph build_tpc_graph(const std::string& topic_id,
                         std::span<const data::ThreadRecord> threads);

// Checks the structural invariants (bounds, uniqueness, forest shape) and
// throws DataError describing the first violation.
void validate(const TpcGraph& graph);

// Hop distances from `source`; unreachable nodes get SIZE_MAX.
std::vector<std::size_t> bfs_distances(const TpcGraph& graph, std::size_t source);

// Edge list, one "kind:id kind:id" pair per line, in BFS order from the
// topic (or from each post in order when there is no topic node).
std::string dump_edge_list(const TpcGraph& graph);

}  // namespace tpcgcn::graph

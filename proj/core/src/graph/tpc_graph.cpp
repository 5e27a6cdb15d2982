#include "tpcgcn/graph/tpc_graph.hpp"

#include <limits>
#include <queue>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "tpcgcn/error.hpp"

namespace tpcgcn::graph {

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::Topic:
      return "topic";
    case NodeKind::Post:
      return "post";
    case NodeKind::Comment:
      return "comment";
  }
  return "?";
}

NodeKind parse_node_kind(std::string_view s) {
  if (s == "topic") return NodeKind::Topic;
  if (s == "post") return NodeKind::Post;
  if (s == "comment") return NodeKind::Comment;
  throw ValidationError("unknown node kind '" + std::string(s) + "'");
}

std::optional<std::size_t> TpcGraph::find(std::string_view id) const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].id == id) return i;
  return std::nullopt;
}

std::vector<std::vector<std::size_t>> TpcGraph::adjacency_lists() const {
  std::vector<std::vector<std::size_t>> adj(nodes.size());
  for (const auto& e : edges) {
    adj[e.a].push_back(e.b);
    adj[e.b].push_back(e.a);
  }
  return adj;
}

std::size_t TpcGraph::connected_components() const {
  std::vector<bool> seen(nodes.size(), false);
  const auto adj = adjacency_lists();
  std::size_t components = 0;
  for (std::size_t s = 0; s < nodes.size(); ++s) {
    if (seen[s]) continue;
    ++components;
    std::vector<std::size_t> stack{s};
    seen[s] = true;
    while (!stack.empty()) {
      const auto u = stack.back();
      stack.pop_back();
      for (auto v : adj[u]) {
        if (!seen[v]) {
          seen[v] = true;
          stack.push_back(v);
        }
      }
    }
  }
  return components;
}

TpcGraph build_tpc_graph(const std::string& topic_id,
                         std::span<const data::ThreadRecord> threads) {
  if (threads.empty()) {
    throw DataError("topic '" + topic_id + "': cannot build a graph from zero threads");
  }
  TpcGraph g;
  g.topic = topic_id;
  std::unordered_set<std::string> ids;
  auto add_node = [&](const std::string& id, NodeKind kind) {
    if (!ids.insert(id).second) {
      throw DataError("topic '" + topic_id + "': duplicate node id '" + id + "'");
    }
    g.nodes.push_back({id, kind});
    return g.nodes.size() - 1;
  };

  g.topic_position = add_node(topic_id, NodeKind::Topic);
  for (const auto& t : threads) {
    if (t.topic_id != topic_id) {
      throw DataError("post '" + t.post_id + "' belongs to topic '" + t.topic_id +
                      "', not '" + topic_id + "'");
    }
    PostSlot slot{add_node(t.post_id, NodeKind::Post), {}};
    g.edges.push_back({*g.topic_position, slot.position});
    std::unordered_map<std::string, std::size_t> local;
    for (const auto& c : t.comments) {
      std::size_t parent = slot.position;
      if (c.parent_id && *c.parent_id != t.post_id) {
        const auto it = local.find(*c.parent_id);
        if (it == local.end()) {
          throw DataError("comment '" + c.id + "' of post '" + t.post_id +
                          "' replies to unknown or later comment '" + *c.parent_id + "'");
        }
        parent = it->second;
      }
      const auto pos = add_node(c.id, NodeKind::Comment);
      local.emplace(c.id, pos);
      g.edges.push_back({parent, pos});
      slot.comments.push_back(pos);
    }
    g.posts.push_back(std::move(slot));
  }
  return g;
}

void validate(const TpcGraph& g) {
  const std::size_t n = g.nodes.size();
  std::unordered_set<std::string> ids;
  std::size_t topics = 0;
  for (const auto& node : g.nodes) {
    if (!ids.insert(node.id).second) throw DataError("duplicate node id '" + node.id + "'");
    if (node.kind == NodeKind::Topic) ++topics;
  }
  if (topics > 1) throw DataError("graph has more than one topic node");
  if ((topics == 1) != g.topic_position.has_value()) {
    throw DataError("topic position does not match topic node count");
  }
  if (g.topic_position && (*g.topic_position >= n ||
                           g.nodes[*g.topic_position].kind != NodeKind::Topic)) {
    throw DataError("topic position does not reference the topic node");
  }
  std::vector<std::size_t> parent_edges(n, 0);
  for (const auto& e : g.edges) {
    if (e.a >= n || e.b >= n || e.a == e.b) {
      throw DataError("edge (" + std::to_string(e.a) + "," + std::to_string(e.b) +
                      ") is invalid for " + std::to_string(n) + " nodes");
    }
    ++parent_edges[e.b];
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto kind = g.nodes[i].kind;
    const std::size_t expected =
        kind == NodeKind::Comment || (kind == NodeKind::Post && g.topic_position) ? 1 : 0;
    if (parent_edges[i] != expected) {
      throw DataError("node '" + g.nodes[i].id + "' has " +
                      std::to_string(parent_edges[i]) + " parent edges, expected " +
                      std::to_string(expected));
    }
  }
  if (g.connected_components() + g.edges.size() != n) {
    throw DataError("graph contains a cycle");
  }
  for (const auto& slot : g.posts) {
    if (slot.position >= n || g.nodes[slot.position].kind != NodeKind::Post) {
      throw DataError("post slot references a non-post node");
    }
    for (auto c : slot.comments) {
      if (c >= n || g.nodes[c].kind != NodeKind::Comment) {
        throw DataError("post slot of '" + g.nodes[slot.position].id +
                        "' references a non-comment node");
      }
    }
  }
}

std::vector<std::size_t> bfs_distances(const TpcGraph& g, std::size_t source) {
  std::vector<std::size_t> dist(g.nodes.size(), std::numeric_limits<std::size_t>::max());
  const auto adj = g.adjacency_lists();
  std::queue<std::size_t> q;
  dist[source] = 0;
  q.push(source);
  while (!q.empty()) {
    const auto u = q.front();
    q.pop();
    for (auto v : adj[u]) {
      if (dist[v] == std::numeric_limits<std::size_t>::max()) {
        dist[v] = dist[u] + 1;
        q.push(v);
      }
    }
  }
  return dist;
}

std::string dump_edge_list(const TpcGraph& g) {
  const auto adj = g.adjacency_lists();
  std::vector<bool> seen(g.nodes.size(), false);
  std::ostringstream out;
  auto label = [&](std::size_t i) {
    return std::string(to_string(g.nodes[i].kind)) + ":" + g.nodes[i].id;
  };
  auto bfs = [&](std::size_t root) {
    if (seen[root]) return;
    std::queue<std::size_t> q;
    seen[root] = true;
    q.push(root);
    while (!q.empty()) {
      const auto u = q.front();
      q.pop();
      for (auto v : adj[u]) {
        if (seen[v]) continue;
        seen[v] = true;
        out << label(u) << ' ' << label(v) << '\n';
        q.push(v);
      }
    }
  };
  if (g.topic_position) bfs(*g.topic_position);
  for (const auto& slot : g.posts) bfs(slot.position);
  for (std::size_t i = 0; i < g.nodes.size(); ++i) bfs(i);
  return out.str();
}

}  // namespace tpcgcn::graph

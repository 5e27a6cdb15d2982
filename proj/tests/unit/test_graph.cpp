#include <gtest/gtest.h>

#include <algorithm>

#include "fixtures.hpp"
#include "tpcgcn/error.hpp"
#include "tpcgcn/graph/ablation.hpp"
#include "tpcgcn/graph/adjacency.hpp"
#include "tpcgcn/graph/reply_tree.hpp"
#include "tpcgcn/graph/tpc_graph.hpp"
#include "tpcgcn/tensor/matrix.hpp"

using namespace tpcgcn;
using namespace tpcgcn::graph;
using data::CommentRecord;
using data::ThreadRecord;

namespace {

CommentRecord comment(std::string id, std::optional<std::string> parent, std::int64_t t,
                      std::string author = "a", std::optional<std::string> mention = {}) {
  CommentRecord c;
  c.id = std::move(id);
  c.parent_id = std::move(parent);
  c.created_at = t;
  c.author = std::move(author);
  c.mentioned_user = std::move(mention);
  c.text = "x";
  return c;
}

ThreadRecord thread(std::string id, std::vector<CommentRecord> comments, std::int64_t t = 0) {
  ThreadRecord r;
  r.post_id = std::move(id);
  r.topic_id = "T";
  r.text = "p";
  r.created_at = t;
  r.comments = std::move(comments);
  return r;
}

// Fixture: topic T; post p1 with c1 <- c2 (c2 replies to c1) and c3; post p2 alone.
std::vector<ThreadRecord> small_topic() {
  return {thread("p1", {comment("c1", std::nullopt, 1), comment("c2", "c1", 2),
                        comment("c3", std::nullopt, 3)}),
          thread("p2", {})};
}

}  // namespace

TEST(TpcGraph, NodeOrderAndEdges) {
  const auto recs = small_topic();
  const auto g = build_tpc_graph("T", recs);
  ASSERT_EQ(g.node_count(), 6u);
  EXPECT_EQ(g.nodes[0].id, "T");
  EXPECT_EQ(g.nodes[0].kind, NodeKind::Topic);
  EXPECT_EQ(g.nodes[1].id, "p1");
  EXPECT_EQ(g.nodes[2].id, "c1");
  EXPECT_EQ(g.nodes[5].id, "p2");
  // Tree: topic hub to 2 posts plus 3 reply edges.
  EXPECT_EQ(g.edge_count(), 5u);
  EXPECT_EQ(g.connected_components(), 1u);
  const std::vector<Edge> expected{{0, 1}, {1, 2}, {2, 3}, {1, 4}, {0, 5}};
  for (const auto& e : expected)
    EXPECT_NE(std::find(g.edges.begin(), g.edges.end(), e), g.edges.end());
  ASSERT_EQ(g.posts.size(), 2u);
  EXPECT_EQ(g.posts[0].comments, (std::vector<std::size_t>{2, 3, 4}));
  EXPECT_TRUE(g.posts[1].comments.empty());
  EXPECT_NO_THROW(validate(g));
}

TEST(TpcGraph, RejectsBadInput) {
  EXPECT_THROW(build_tpc_graph("T", std::vector<ThreadRecord>{}), ValidationError);
  auto dangling = small_topic();
  dangling[0].comments[1].parent_id = "nope";
  EXPECT_THROW(build_tpc_graph("T", dangling), DataError);
  auto later = small_topic();
  later[0].comments[0].parent_id = "c2";  // parent listed after child
  EXPECT_THROW(build_tpc_graph("T", later), DataError);
  auto dup = small_topic();
  dup[1].comments.push_back(comment("c1", std::nullopt, 9));
  EXPECT_THROW(build_tpc_graph("T", dup), DataError);
  auto foreign = small_topic();
  foreign[1].topic_id = "other";
  EXPECT_THROW(build_tpc_graph("T", foreign), DataError);
}

TEST(TpcGraph, BfsAndDump) {
  const auto recs = small_topic();
  const auto g = build_tpc_graph("T", recs);
  const auto d = bfs_distances(g, 0);
  EXPECT_EQ(d, (std::vector<std::size_t>{0, 1, 2, 3, 2, 1}));
  const auto dump = dump_edge_list(g);
  EXPECT_EQ(dump.substr(0, dump.find('\n')), "topic:T post:p1");
  EXPECT_EQ(std::count(dump.begin(), dump.end(), '\n'), 5);
}

TEST(TpcGraph, RandomTreesAreConnectedForests) {
  tensor::SeededRng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.uniform_index(19);
    const std::size_t posts = 1 + rng.uniform_index(std::min<std::size_t>(n - 1, 5));
    const auto recs = testkit::random_thread_set(n, posts, rng);
    const auto g = build_tpc_graph("t", recs);
    EXPECT_EQ(g.node_count(), n);
    EXPECT_EQ(g.edge_count(), n - 1);
    EXPECT_EQ(g.connected_components(), 1u);
  }
}

TEST(Adjacency, TwoNodeHandValues) {
  // Topic with a single post: A + I is all ones, degrees 2, so every entry is 1/2.
  const auto g = build_tpc_graph("T", std::vector<ThreadRecord>{thread("p", {})});
  EXPECT_LE(tensor::max_abs_diff(normalize_adjacency(g).densify(),
                                 tensor::Matrix{{0.5, 0.5}, {0.5, 0.5}}),
            1e-15);
}

TEST(Adjacency, MatchesDenseOracleOnRandomTrees) {
  tensor::SeededRng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.uniform_index(19);
    const auto recs = testkit::random_thread_set(n, 1 + rng.uniform_index(n - 1), rng);
    const auto g = build_tpc_graph("t", recs);
    const auto a = normalize_adjacency(g);
    EXPECT_LE(tensor::max_abs_diff(a.densify(), testkit::dense_normalized_adjacency(g)), 1e-12);
    // Symmetric.
    const auto d = a.densify();
    EXPECT_EQ(d, d.transposed());
  }
}

TEST(Adjacency, IsolatedNodeHasUnitDiagonal) {
  TpcGraph g;
  g.nodes = {{"a", NodeKind::Post}, {"b", NodeKind::Post}};
  g.posts = {{0, {}}, {1, {}}};
  EXPECT_EQ(normalize_adjacency(g).densify(), tensor::Matrix::identity(2));
}

TEST(ReplyTree, MentionsAttachToLatestEarlierComment) {
  const std::vector<CommentRecord> cs{
      comment("a1", std::nullopt, 10, "alice"),
      comment("b1", std::nullopt, 20, "bob", "alice"),
      comment("a2", std::nullopt, 30, "alice"),
      comment("c1", std::nullopt, 40, "carol", "alice"),
      comment("d1", std::nullopt, 5, "dave", "zed"),  // unknown mention, earliest
      comment("e1", std::nullopt, 50, "erin", "erin"),  // no earlier own comment
  };
  const auto links = rebuild_reply_tree(cs);
  ASSERT_EQ(links.size(), 6u);
  EXPECT_EQ(links[0].comment_id, "d1");
  EXPECT_FALSE(links[0].parent_id);
  EXPECT_FALSE(links[1].parent_id);  // a1
  EXPECT_EQ(links[2].parent_id, "a1");  // b1
  EXPECT_EQ(links[4].comment_id, "c1");
  EXPECT_EQ(links[4].parent_id, "a2");
  EXPECT_FALSE(links[5].parent_id);
}

TEST(ReplyTree, RebuiltThreadBuildsValidGraph) {
  auto t = thread("p", {comment("x", std::nullopt, 30, "u1", "u2"),
                        comment("y", std::nullopt, 10, "u2")});
  const auto rebuilt = with_rebuilt_replies(t);
  ASSERT_EQ(rebuilt.comments.size(), 2u);
  EXPECT_EQ(rebuilt.comments[0].id, "y");
  EXPECT_EQ(rebuilt.comments[1].parent_id, "y");
  EXPECT_NO_THROW(build_tpc_graph("T", std::vector<ThreadRecord>{rebuilt}));
}

TEST(Truncation, MaxCountAndWindow) {
  std::vector<CommentRecord> cs;
  for (int i = 0; i < 20; ++i)
    cs.push_back(comment("c" + std::to_string(i), std::nullopt, 100 + i * 300));
  const auto t = thread("p", cs, 100);
  EXPECT_EQ(truncate_comments(t, TruncationPolicy::max_comments(15)).comments.size(), 15u);
  // One hour window: offsets 0, 300, ..., 3600 are inside.
  EXPECT_EQ(truncate_comments(t, TruncationPolicy::time_window(3600)).comments.size(), 13u);
}

TEST(Truncation, OrphansAreDropped) {
  // c2 replies to c1, which falls outside the count limit in time order.
  const auto t = thread("p", {comment("c2", "c1", 50), comment("c1", std::nullopt, 40),
                              comment("c0", std::nullopt, 10)});
  const auto kept = truncate_comments(t, TruncationPolicy::max_comments(1));
  ASSERT_EQ(kept.comments.size(), 1u);
  EXPECT_EQ(kept.comments[0].id, "c0");
  const auto kept2 = truncate_comments(t, TruncationPolicy::max_comments(2));
  ASSERT_EQ(kept2.comments.size(), 2u);
  EXPECT_EQ(kept2.comments[0].id, "c1");  // original listing order preserved
}

TEST(Ablation, DropVariantsRemoveNodesAndEdges) {
  const auto recs = small_topic();
  const auto g = build_tpc_graph("T", recs);
  const auto no_topic = apply_ablation(g, AblationVariant::DropTopic);
  EXPECT_EQ(no_topic.node_count(), 5u);
  EXPECT_EQ(no_topic.edge_count(), 3u);
  EXPECT_FALSE(no_topic.topic_position);
  EXPECT_EQ(no_topic.posts.size(), 2u);
  const auto no_comments = apply_ablation(g, AblationVariant::DropComments);
  EXPECT_EQ(no_comments.node_count(), 3u);
  EXPECT_EQ(no_comments.edge_count(), 2u);
  EXPECT_TRUE(no_comments.posts[0].comments.empty());
  // Original untouched.
  EXPECT_EQ(g.node_count(), 6u);
}

TEST(Ablation, RandomizedVariantsKeepStructure) {
  const auto recs = small_topic();
  const auto g = build_tpc_graph("T", recs);
  for (auto v : {AblationVariant::RandTopicFeat, AblationVariant::RandPostFeat,
                 AblationVariant::RandCommentFeat, AblationVariant::Full}) {
    const auto a = apply_ablation(g, v);
    EXPECT_EQ(a.node_count(), g.node_count());
    EXPECT_EQ(a.edges, g.edges);
  }
  EXPECT_EQ(randomized_kinds(AblationVariant::RandTopicFeat), std::set<NodeKind>{NodeKind::Topic});
  EXPECT_TRUE(randomized_kinds(AblationVariant::DropTopic).empty());
  EXPECT_EQ(parse_ablation_variant("tp-gcn"), AblationVariant::DropComments);
  EXPECT_THROW(parse_ablation_variant("nope"), ValidationError);
}

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tpcgcn/data/embeddings.hpp"
#include "tpcgcn/data/thread_record.hpp"
#include "tpcgcn/graph/reply_tree.hpp"
#include "tpcgcn/graph/tpc_graph.hpp"

namespace tpcgcn::data {

struct PrepOptions {
  // Rebuild reply structure from times and mentions (for sources without
  // an official comment tree).
  bool rebuild_replies = false;
  graph::TruncationPolicy truncation;
};

std::vector<ThreadRecord> prepare_threads(const std::vector<ThreadRecord>& records,
                                          const PrepOptions& options);

// One graph per topic, in lexicographic topic order.
std::vector<graph::TpcGraph> build_topic_graphs(const std::vector<ThreadRecord>& records);

// Topic graphs plus the controversy label of every post.
struct Corpus {
  std::vector<graph::TpcGraph> graphs;
  std::map<std::string, int> labels;
};

Corpus make_corpus(const std::vector<ThreadRecord>& records);

inline constexpr std::uint64_t kFallbackSeed = 0x74706367636eULL;

// Hashed bag-of-words vectors for every topic, post, and comment. A topic
// node's text is its topic id.
EmbeddingTable fallback_embeddings(const std::vector<ThreadRecord>& records, std::size_t dim,
                                   std::uint64_t seed);

}  // namespace tpcgcn::data

#pragma once

#include <cstdint>
#include <vector>

#include "tpcgcn/data/embeddings.hpp"
#include "tpcgcn/data/thread_record.hpp"

namespace tpcgcn::data {

// Where the planted controversy direction lives.
enum class SignalCarrier { PostAndComments, CommentsOnly, PostsOnly };

// Planted-signal fixture. Post i of every topic has label i % 2. Raw features
// are  noise + sign(label) * controversy_signal * e0  on carrier nodes and
// + topic_signal * e(1 + topic)  on every node of the topic, with Gaussian
// noise of the given scale. Texts carry matching marker words so the hashed
// bag-of-words fallback sees the same structure.
struct SyntheticSpec {
  std::size_t topics = 2;
  std::size_t posts_per_topic = 10;
  std::size_t comments_per_post = 3;
  std::size_t dim = 32;
  SignalCarrier carrier = SignalCarrier::PostAndComments;
  double controversy_signal = 1.0;
  double topic_signal = 0.0;
  double noise = 0.3;
  // Noise on post nodes; negative means "same as noise".
  double post_noise = -1.0;
  // Every second comment replies to the previous comment instead of the post.
  bool nested_replies = true;
  std::uint64_t seed = 0;
};

struct SyntheticDataset {
  std::vector<ThreadRecord> records;
  EmbeddingTable embeddings;
};

SyntheticDataset make_synthetic(const SyntheticSpec& spec);

std::string synthetic_topic_id(std::size_t t);

}  // namespace tpcgcn::data

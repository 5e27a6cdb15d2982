#include "tpcgcn/data/synthetic.hpp"

#include <array>
#include <string>

#include "tpcgcn/error.hpp"
#include "tpcgcn/tensor/rng.hpp"

namespace tpcgcn::data {

namespace {

constexpr std::array kControversialWords{"disagree", "wrong", "nonsense", "outrageous"};
constexpr std::array kCalmWords{"agree", "great", "support", "thanks"};
constexpr std::array kFiller{"the",   "a",     "people", "today", "news",  "said",
                             "think", "about", "this",   "really", "just", "time",
                             "new",   "many",  "more",   "story",  "city", "week"};

template <std::size_t N>
std::string pick(const std::array<const char*, N>& words, tensor::SeededRng& rng) {
  return words[rng.uniform_index(N)];
}

}  // namespace

std::string synthetic_topic_id(std::size_t t) { return "topic" + std::to_string(t); }

SyntheticDataset make_synthetic(const SyntheticSpec& spec) {
  if (spec.dim < spec.topics + 1) {
    throw ValidationError("synthetic dim must exceed the topic count");
  }
  tensor::SeededRng rng(spec.seed);
  SyntheticDataset out;
  out.embeddings = EmbeddingTable(spec.dim);
  const double post_noise = spec.post_noise < 0.0 ? spec.noise : spec.post_noise;
  const bool post_carries = spec.carrier != SignalCarrier::CommentsOnly;
  const bool comments_carry = spec.carrier != SignalCarrier::PostsOnly;

  auto vector_for = [&](std::size_t topic, double noise, double contro) {
    std::vector<float> v(spec.dim);
    for (float& x : v) x = static_cast<float>(noise * rng.normal());
    v[0] += static_cast<float>(contro);
    v[1 + topic] += static_cast<float>(spec.topic_signal);
    return v;
  };
  auto sentence = [&](std::size_t topic, int label, bool marked) {
    std::string s = "topicword" + std::to_string(topic);
    for (int k = 0; k < 4; ++k) s += " " + pick(kFiller, rng);
    if (marked) {
      s += " " + (label == 1 ? pick(kControversialWords, rng) : pick(kCalmWords, rng));
      s += " " + (label == 1 ? pick(kControversialWords, rng) : pick(kCalmWords, rng));
    }
    return s;
  };

  std::int64_t clock = 1'500'000'000;
  for (std::size_t t = 0; t < spec.topics; ++t) {
    const std::string topic = synthetic_topic_id(t);
    out.embeddings.insert(topic, vector_for(t, spec.noise, 0.0));
    for (std::size_t i = 0; i < spec.posts_per_topic; ++i) {
      ThreadRecord r;
      r.post_id = topic + "_p" + std::to_string(i);
      r.topic_id = topic;
      r.label = static_cast<int>(i % 2);
      r.created_at = clock;
      clock += 600;
      const double sign = r.label == 1 ? 1.0 : -1.0;
      r.text = sentence(t, r.label, post_carries);
      out.embeddings.insert(
          r.post_id, vector_for(t, post_noise, post_carries ? sign * spec.controversy_signal : 0.0));
      for (std::size_t j = 0; j < spec.comments_per_post; ++j) {
        CommentRecord c;
        c.id = r.post_id + "_c" + std::to_string(j);
        c.author = "user" + std::to_string(rng.uniform_index(50));
        c.created_at = r.created_at + 60 * static_cast<std::int64_t>(j + 1);
        if (spec.nested_replies && j % 2 == 1) {
          c.parent_id = r.comments.back().id;
          c.mentioned_user = r.comments.back().author;
        }
        c.text = sentence(t, r.label, comments_carry);
        out.embeddings.insert(
            c.id, vector_for(t, spec.noise, comments_carry ? sign * spec.controversy_signal : 0.0));
        r.comments.push_back(std::move(c));
      }
      out.records.push_back(std::move(r));
    }
  }
  return out;
}

}  // namespace tpcgcn::data

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "tpcgcn/data/dataset.hpp"
#include "tpcgcn/data/split.hpp"
#include "tpcgcn/model/model_io.hpp"

namespace tpcgcn::eval {

struct AttentionRecord {
  std::string post_id;
  std::string topic;
  double alpha_u = 0.0;
  double alpha_r = 0.0;
  int predicted = 0;
  int label = -1;
  bool operator==(const AttentionRecord&) const = default;
};

// Branch weights for every post of the fold. Throws ValidationError for a
// model without attention.
std::vector<AttentionRecord> export_attention(const model::AnyModel& m,
                                              const data::Corpus& corpus,
                                              const data::EmbeddingTable& embeddings,
                                              const data::SplitSpec& split, data::Fold fold);

// {"post_id", "topic_id", "alpha_u", "alpha_r", "predicted", "label"} per line.
std::string attention_to_jsonl(const std::vector<AttentionRecord>& records);
std::vector<AttentionRecord> attention_from_jsonl(const std::string& text);

}  // namespace tpcgcn::eval

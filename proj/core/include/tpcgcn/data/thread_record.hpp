#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tpcgcn::data {

struct CommentRecord {
  std::string id;
  // Empty means the comment replies to the post directly.
  std::optional<std::string> parent_id;
  std::string author;
  std::string text;
  std::int64_t created_at = 0;
  std::optional<std::string> mentioned_user;
};

// One post with its comments, its topic, and its controversy label
// (0 non-controversial, 1 controversial).
struct ThreadRecord {
  std::string post_id;
  std::string topic_id;
  std::string text;
  int label = 0;
  std::int64_t created_at = 0;
  std::vector<CommentRecord> comments;
};

}  // namespace tpcgcn::data

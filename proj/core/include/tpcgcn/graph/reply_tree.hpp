#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tpcgcn/data/thread_record.hpp"

namespace tpcgcn::graph {

struct ReplyLink {
  std::string comment_id;
  std::optional<std::string> parent_id;  // nullopt: replies to the post
};

// Reconstructs reply structure from timestamps and mentions. Comments are
// ordered by (created_at, id). A comment that mentions user u attaches to u's
// most recent earlier comment; otherwise, or if u has no earlier comment, it
// attaches to the post. Links are returned in that time order.
std::vector<ReplyLink> rebuild_reply_tree(std::span<const data::CommentRecord> comments);

// Returns the thread with comments sorted by time and parent ids replaced by
// the rebuilt links.
data::ThreadRecord with_rebuilt_replies(const data::ThreadRecord& thread);

// Comment truncation. Both limits may be set; a comment survives only if it
// passes every limit and its parent survives.
struct TruncationPolicy {
  std::optional<std::size_t> max_count;
  std::optional<std::int64_t> window_seconds;

  static TruncationPolicy max_comments(std::size_t n) { return {n, std::nullopt}; }
  static TruncationPolicy time_window(std::int64_t seconds) {
    return {std::nullopt, seconds};
  }
};

// Walks comments in (created_at, id) order and keeps a comment when its
// parent (the post or an already kept comment) is kept, it falls inside the
// time window measured from the post's created_at, and fewer than max_count
// comments have been kept so far. Survivors keep their original listing order.
data::ThreadRecord truncate_comments(const data::ThreadRecord& thread,
                                     const TruncationPolicy& policy);

}  // namespace tpcgcn::graph

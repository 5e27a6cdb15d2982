#include "tpcgcn/graph/reply_tree.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

namespace tpcgcn::graph {

namespace {

std::vector<std::size_t> time_order(std::span<const data::CommentRecord> comments) {
  std::vector<std::size_t> order(comments.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (comments[a].created_at != comments[b].created_at)
      return comments[a].created_at < comments[b].created_at;
    return comments[a].id < comments[b].id;
  });
  return order;
}

}  // namespace

std::vector<ReplyLink> rebuild_reply_tree(std::span<const data::CommentRecord> comments) {
  std::vector<ReplyLink> links;
  links.reserve(comments.size());
  std::unordered_map<std::string, std::string> latest_by_author;
  for (auto i : time_order(comments)) {
    const auto& c = comments[i];
    ReplyLink link{c.id, std::nullopt};
    if (c.mentioned_user) {
      const auto it = latest_by_author.find(*c.mentioned_user);
      if (it != latest_by_author.end()) link.parent_id = it->second;
    }
    latest_by_author[c.author] = c.id;
    links.push_back(std::move(link));
  }
  return links;
}

data::ThreadRecord with_rebuilt_replies(const data::ThreadRecord& thread) {
  data::ThreadRecord out = thread;
  out.comments.clear();
  const auto links = rebuild_reply_tree(thread.comments);
  const auto order = time_order(thread.comments);
  for (std::size_t k = 0; k < order.size(); ++k) {
    data::CommentRecord c = thread.comments[order[k]];
    c.parent_id = links[k].parent_id;
    out.comments.push_back(std::move(c));
  }
  return out;
}

data::ThreadRecord truncate_comments(const data::ThreadRecord& thread,
                                     const TruncationPolicy& policy) {
  std::unordered_set<std::string> kept;
  std::vector<bool> keep(thread.comments.size(), false);
  std::size_t count = 0;
  for (auto i : time_order(thread.comments)) {
    const auto& c = thread.comments[i];
    if (policy.max_count && count >= *policy.max_count) break;
    if (policy.window_seconds && c.created_at > thread.created_at + *policy.window_seconds)
      continue;
    const bool parent_kept =
        !c.parent_id || *c.parent_id == thread.post_id || kept.contains(*c.parent_id);
    if (!parent_kept) continue;
    kept.insert(c.id);
    keep[i] = true;
    ++count;
  }
  data::ThreadRecord out = thread;
  out.comments.clear();
  for (std::size_t i = 0; i < thread.comments.size(); ++i)
    if (keep[i]) out.comments.push_back(thread.comments[i]);
  return out;
}

}  // namespace tpcgcn::graph

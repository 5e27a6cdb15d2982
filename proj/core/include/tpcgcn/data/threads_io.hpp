#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <string>
#include <vector>

#include "tpcgcn/data/thread_record.hpp"

namespace tpcgcn::data {

// Thread JSONL, one post per line:
//   {"id", "topic_id", "text", "label", "created_at",
//    "comments": [{"id", "parent_id" | null, "author", "text", "created_at",
//                  "mentioned_user"?}]}
// Blank lines are skipped. Errors name the 1-based line and the field.
std::vector<ThreadRecord> load_threads(const std::filesystem::path& path);
std::vector<ThreadRecord> parse_threads(std::istream& in, const std::string& source);

std::string thread_to_json_line(const ThreadRecord& record);
void write_threads(const std::filesystem::path& path, const std::vector<ThreadRecord>& records);

// Records grouped by topic id; topics in lexicographic order, posts in input
// order within each topic.
std::map<std::string, std::vector<ThreadRecord>> group_by_topic(
    const std::vector<ThreadRecord>& records);

}  // namespace tpcgcn::data

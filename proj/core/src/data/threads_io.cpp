#include "tpcgcn/data/threads_io.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "tpcgcn/error.hpp"
#include "tpcgcn/tensor/checkpoint.hpp"

namespace tpcgcn::data {

using nlohmann::json;

namespace {

class LineContext {
 public:
  LineContext(const std::string& source, std::size_t line) : source_(source), line_(line) {}

  [[noreturn]] void fail(const std::string& field, const std::string& what) const {
    throw DataError(source_ + ":" + std::to_string(line_) + ": field '" + field + "' " + what);
  }

  const json& require(const json& obj, const std::string& key, const std::string& path) const {
    const auto it = obj.find(key);
    if (it == obj.end()) fail(path + key, "is missing");
    return *it;
  }

  std::string string_field(const json& obj, const std::string& key,
                           const std::string& path = "") const {
    const auto& v = require(obj, key, path);
    if (!v.is_string()) fail(path + key, "must be a string");
    return v.get<std::string>();
  }

  std::int64_t time_field(const json& obj, const std::string& key,
                          const std::string& path = "") const {
    const auto& v = require(obj, key, path);
    if (!v.is_number_integer()) fail(path + key, "must be an integer (epoch seconds)");
    return v.get<std::int64_t>();
  }

 private:
  const std::string& source_;
  std::size_t line_;
};

ThreadRecord parse_record(const json& j, const LineContext& ctx) {
  if (!j.is_object()) ctx.fail("<line>", "is not a JSON object");
  ThreadRecord r;
  r.post_id = ctx.string_field(j, "id");
  r.topic_id = ctx.string_field(j, "topic_id");
  r.text = ctx.string_field(j, "text");
  const auto& label = ctx.require(j, "label", "");
  if (!label.is_number_integer() || (label.get<std::int64_t>() != 0 && label.get<std::int64_t>() != 1)) {
    ctx.fail("label", "must be 0 or 1, got " + label.dump());
  }
  r.label = label.get<int>();
  r.created_at = ctx.time_field(j, "created_at");
  const auto& comments = ctx.require(j, "comments", "");
  if (!comments.is_array()) ctx.fail("comments", "must be an array");
  std::unordered_set<std::string> comment_ids;
  for (std::size_t i = 0; i < comments.size(); ++i) {
    const auto& cj = comments[i];
    const std::string path = "comments[" + std::to_string(i) + "].";
    if (!cj.is_object()) ctx.fail(path.substr(0, path.size() - 1), "is not an object");
    CommentRecord c;
    c.id = ctx.string_field(cj, "id", path);
    if (!comment_ids.insert(c.id).second) ctx.fail(path + "id", "duplicates '" + c.id + "'");
    const auto& parent = ctx.require(cj, "parent_id", path);
    if (parent.is_string()) {
      c.parent_id = parent.get<std::string>();
    } else if (!parent.is_null()) {
      ctx.fail(path + "parent_id", "must be a string or null");
    }
    c.author = ctx.string_field(cj, "author", path);
    c.text = ctx.string_field(cj, "text", path);
    c.created_at = ctx.time_field(cj, "created_at", path);
    if (const auto it = cj.find("mentioned_user"); it != cj.end() && !it->is_null()) {
      if (!it->is_string()) ctx.fail(path + "mentioned_user", "must be a string");
      c.mentioned_user = it->get<std::string>();
    }
    r.comments.push_back(std::move(c));
  }
  return r;
}

}  // namespace

std::vector<ThreadRecord> parse_threads(std::istream& in, const std::string& source) {
  std::vector<ThreadRecord> out;
  std::unordered_set<std::string> post_ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    LineContext ctx(source, line_no);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DataError(source + ":" + std::to_string(line_no) + ": malformed JSON: " + e.what());
    }
    auto record = parse_record(j, ctx);
    if (!post_ids.insert(record.post_id).second) {
      ctx.fail("id", "duplicates post id '" + record.post_id + "'");
    }
    out.push_back(std::move(record));
  }
  return out;
}

std::vector<ThreadRecord> load_threads(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open thread file " + path.string());
  return parse_threads(in, path.string());
}

std::string thread_to_json_line(const ThreadRecord& r) {
  json comments = json::array();
  for (const auto& c : r.comments) {
    json cj = {{"id", c.id},
               {"parent_id", c.parent_id ? json(*c.parent_id) : json(nullptr)},
               {"author", c.author},
               {"text", c.text},
               {"created_at", c.created_at}};
    if (c.mentioned_user) cj["mentioned_user"] = *c.mentioned_user;
    comments.push_back(std::move(cj));
  }
  json j = {{"id", r.post_id},     {"topic_id", r.topic_id},     {"text", r.text},
            {"label", r.label},    {"created_at", r.created_at}, {"comments", comments}};
  return j.dump();
}

void write_threads(const std::filesystem::path& path, const std::vector<ThreadRecord>& records) {
  std::string text;
  for (const auto& r : records) text += thread_to_json_line(r) + "\n";
  tensor::write_file_atomically(path, text);
}

std::map<std::string, std::vector<ThreadRecord>> group_by_topic(
    const std::vector<ThreadRecord>& records) {
  std::map<std::string, std::vector<ThreadRecord>> out;
  for (const auto& r : records) out[r.topic_id].push_back(r);
  return out;
}

}  // namespace tpcgcn::data

#include "tpcgcn/data/embeddings.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

#include "tpcgcn/bytes.hpp"
#include "tpcgcn/error.hpp"
#include "tpcgcn/tensor/checkpoint.hpp"
#include "tpcgcn/tensor/rng.hpp"

namespace tpcgcn::data {

using nlohmann::json;

namespace {
constexpr std::string_view kMagic = "TPCE";
constexpr std::uint16_t kVersion = 1;
}  // namespace

void EmbeddingTable::insert(const std::string& id, std::vector<float> vec) {
  if (vectors_.contains(id)) throw DataError("duplicate embedding id '" + id + "'");
  insert_or_assign(id, std::move(vec));
}

void EmbeddingTable::insert_or_assign(const std::string& id, std::vector<float> vec) {
  if (dim_ == 0 && vectors_.empty()) dim_ = vec.size();
  if (vec.size() != dim_) {
    throw DataError("embedding '" + id + "' has dimension " + std::to_string(vec.size()) +
                    ", table dimension is " + std::to_string(dim_));
  }
  vectors_.insert_or_assign(id, std::move(vec));
}

const std::vector<float>& EmbeddingTable::at(const std::string& id) const {
  const auto it = vectors_.find(id);
  if (it == vectors_.end()) throw DataError("no embedding for node id '" + id + "'");
  return it->second;
}

std::vector<std::uint8_t> encode_embeddings_binary(const EmbeddingTable& table) {
  bytes::Writer w;
  w.raw(kMagic);
  w.u16(kVersion);
  w.u32(static_cast<std::uint32_t>(table.dim()));
  for (const auto& [id, vec] : table.entries()) {
    if (id.size() > std::numeric_limits<std::uint16_t>::max()) {
      throw ValidationError("embedding id too long: " + id.substr(0, 32) + "...");
    }
    w.u16(static_cast<std::uint16_t>(id.size()));
    w.raw(id);
    for (float v : vec) w.f32(v);
  }
  return w.take();
}

EmbeddingTable decode_embeddings_binary(std::span<const std::uint8_t> data) {
  bytes::Reader r(data, "embedding file");
  if (r.raw(kMagic.size()) != kMagic) throw DataError("embedding file: bad magic bytes");
  const auto version = r.u16();
  if (version != kVersion) {
    throw DataError("embedding file: unsupported version " + std::to_string(version));
  }
  EmbeddingTable table(r.u32());
  while (!r.at_end()) {
    std::string id = r.raw(r.u16());
    std::vector<float> vec(table.dim());
    for (float& v : vec) v = r.f32();
    table.insert(id, std::move(vec));
  }
  return table;
}

EmbeddingTable load_embeddings(const std::filesystem::path& path) {
  const auto data = bytes::read_file(path);
  if (data.size() >= kMagic.size() &&
      std::equal(kMagic.begin(), kMagic.end(), data.begin(),
                 [](char a, std::uint8_t b) { return static_cast<std::uint8_t>(a) == b; })) {
    return decode_embeddings_binary(data);
  }
  EmbeddingTable table;
  std::string text(data.begin(), data.end());
  std::size_t start = 0;
  std::size_t line_no = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    const std::string line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no) + ": ";
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DataError(where + "malformed JSON: " + e.what());
    }
    if (!j.is_object() || !j.contains("id") || !j["id"].is_string())
      throw DataError(where + "field 'id' missing or not a string");
    if (!j.contains("vec") || !j["vec"].is_array())
      throw DataError(where + "field 'vec' missing or not an array");
    std::vector<float> vec;
    vec.reserve(j["vec"].size());
    for (const auto& v : j["vec"]) {
      if (!v.is_number()) throw DataError(where + "field 'vec' holds a non-number");
      vec.push_back(static_cast<float>(v.get<double>()));
    }
    try {
      table.insert(j["id"].get<std::string>(), std::move(vec));
    } catch (const DataError& e) {
      throw DataError(where + e.what());
    }
  }
  return table;
}

void write_embeddings(const EmbeddingTable& table, const std::filesystem::path& path,
                      EmbeddingFormat format) {
  if (format == EmbeddingFormat::Binary) {
    tensor::write_file_atomically(path, encode_embeddings_binary(table));
    return;
  }
  std::string text;
  for (const auto& [id, vec] : table.entries()) {
    json arr = json::array();
    for (float v : vec) arr.push_back(static_cast<double>(v));
    text += json{{"id", id}, {"vec", arr}}.dump() + "\n";
  }
  tensor::write_file_atomically(path, text);
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };
  for (std::size_t i = 0; i < text.size();) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (c < 0x80) {
      if (std::isspace(c) || std::ispunct(c)) {
        flush();
      } else {
        current.push_back(static_cast<char>(std::tolower(c)));
      }
      ++i;
      continue;
    }
    // Non-ASCII: one token per UTF-8 code point.
    std::size_t len = (c >= 0xF0) ? 4 : (c >= 0xE0) ? 3 : (c >= 0xC0) ? 2 : 1;
    len = std::min(len, text.size() - i);
    flush();
    tokens.emplace_back(text.substr(i, len));
    i += len;
  }
  flush();
  return tokens;
}

std::vector<float> hashed_bow_embed(std::string_view text, std::size_t dim,
                                    std::uint64_t seed) {
  if (dim == 0) throw ValidationError("hashed_bow_embed: dim must be >= 1");
  std::vector<double> acc(dim, 0.0);
  const std::uint64_t salt = tensor::mix64(seed);
  for (const auto& tok : tokenize(text)) {
    const std::uint64_t h = tensor::mix64(tensor::fnv1a64(tok) ^ salt);
    const double sign = (tensor::mix64(h) & 1) ? 1.0 : -1.0;
    acc[h % dim] += sign;
  }
  double norm = 0.0;
  for (double v : acc) norm += v * v;
  norm = std::sqrt(norm);
  std::vector<float> out(dim, 0.0f);
  if (norm > 0.0)
    for (std::size_t i = 0; i < dim; ++i) out[i] = static_cast<float>(acc[i] / norm);
  return out;
}

std::unordered_map<std::string, graph::NodeKind> node_kinds(
    std::span<const graph::TpcGraph> graphs) {
  std::unordered_map<std::string, graph::NodeKind> out;
  for (const auto& g : graphs)
    for (const auto& n : g.nodes) out.emplace(n.id, n.kind);
  return out;
}

EmbeddingTable randomize_features(const EmbeddingTable& table,
                                  const std::unordered_map<std::string, graph::NodeKind>& kind_of,
                                  const std::set<graph::NodeKind>& kinds, std::uint64_t seed) {
  EmbeddingTable out = table;
  if (kinds.empty() || table.dim() == 0) return out;
  const double a = std::sqrt(6.0 / static_cast<double>(table.dim()));
  const tensor::SeededRng base(seed);
  for (const auto& [id, vec] : table.entries()) {
    const auto it = kind_of.find(id);
    if (it == kind_of.end() || !kinds.contains(it->second)) continue;
    auto rng = base.derive(id);
    std::vector<float> fresh(table.dim());
    for (float& v : fresh) v = static_cast<float>(rng.uniform(-a, a));
    out.insert_or_assign(id, std::move(fresh));
  }
  return out;
}

}  // namespace tpcgcn::data

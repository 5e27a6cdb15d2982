#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "tpcgcn/graph/tpc_graph.hpp"

namespace tpcgcn::data {

// Node id -> fixed-dimension raw feature vector. Ids iterate in lexicographic
// order, which fixes the record order of the binary format.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  explicit EmbeddingTable(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return vectors_.size(); }
  bool contains(const std::string& id) const { return vectors_.contains(id); }

  // Throws DataError on a dimension mismatch or a duplicate id.
  void insert(const std::string& id, std::vector<float> vec);
  void insert_or_assign(const std::string& id, std::vector<float> vec);
  // Throws DataError naming the id when absent.
  const std::vector<float>& at(const std::string& id) const;

  const std::map<std::string, std::vector<float>>& entries() const { return vectors_; }

  bool operator==(const EmbeddingTable&) const = default;

 private:
  std::size_t dim_ = 0;
  std::map<std::string, std::vector<float>> vectors_;
};

enum class EmbeddingFormat { Jsonl, Binary };

// Embedding JSONL: {"id": string, "vec": [reals]} per line.
// Embedding binary: "TPCE", u16 version, u32 dim, then per record u16 id
// length, UTF-8 id, dim x f32, all little-endian.
// The format is detected from the leading magic bytes.
EmbeddingTable load_embeddings(const std::filesystem::path& path);
void write_embeddings(const EmbeddingTable& table, const std::filesystem::path& path,
                      EmbeddingFormat format);

std::vector<std::uint8_t> encode_embeddings_binary(const EmbeddingTable& table);
EmbeddingTable decode_embeddings_binary(std::span<const std::uint8_t> data);

// Sign-hash bag of words: lowercase ASCII, split on whitespace and ASCII
// punctuation (each non-ASCII code point is its own token), hash every token
// to an index and a sign, accumulate, and L2-normalize unless all zero.
std::vector<float> hashed_bow_embed(std::string_view text, std::size_t dim,
                                    std::uint64_t seed);
std::vector<std::string> tokenize(std::string_view text);

// Kind of every node across a set of graphs.
std::unordered_map<std::string, graph::NodeKind> node_kinds(
    std::span<const graph::TpcGraph> graphs);

// Replaces the vectors of nodes whose kind is in `kinds` with i.i.d.
// U(-a, a) samples, a = sqrt(6 / dim). Each node's draw depends only on the
// seed and its id. Other vectors are copied unchanged.
EmbeddingTable randomize_features(const EmbeddingTable& table,
                                  const std::unordered_map<std::string, graph::NodeKind>& kind_of,
                                  const std::set<graph::NodeKind>& kinds, std::uint64_t seed);

}  // namespace tpcgcn::data

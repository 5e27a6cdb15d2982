#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "tpcgcn/data/thread_record.hpp"

namespace tpcgcn::data {

enum class Fold { Train = 0, Val = 1, Test = 2 };
enum class SplitMode { IntraTopic, InterTopic };

std::string_view to_string(Fold f);
Fold parse_fold(std::string_view s);
std::string_view to_string(SplitMode m);
SplitMode parse_split_mode(std::string_view s);

struct SplitRatios {
  std::array<int, 3> parts{4, 1, 1};
  static SplitRatios parse(std::string_view text);  // "A:B:C"
};

struct SplitSpec {
  SplitMode mode = SplitMode::IntraTopic;
  SplitRatios ratios;
  std::uint64_t seed = 0;
  std::map<std::string, Fold> assignment;

  // Ids of one fold, in ascending id order.
  std::vector<std::string> ids(Fold f) const;
  std::array<std::size_t, 3> counts() const;
};

// Largest-remainder apportionment of `units` into counts proportional to the
// ratios. Ties in the fractional part go to the earlier fold. When
// `min_one_each` is set and units >= 3, a fold left empty takes one unit
// from the currently largest fold.
std::array<std::size_t, 3> apportion(std::size_t units, const SplitRatios& ratios,
                                     bool min_one_each);

// IntraTopic: posts of each topic are shuffled and apportioned separately,
// then merged. InterTopic: topics are shuffled and apportioned whole.
// Deterministic in the seed. Throws DataError when a fold would be empty.
SplitSpec make_split(const std::vector<ThreadRecord>& records, SplitMode mode,
                     const SplitRatios& ratios, std::uint64_t seed);

// Split JSON: {"mode", "seed", "ratios", "train":[ids], "val":[ids], "test":[ids]}.
std::string split_to_json(const SplitSpec& split);
SplitSpec split_from_json(const std::string& text);
SplitSpec load_split(const std::filesystem::path& path);
void write_split(const SplitSpec& split, const std::filesystem::path& path);

}  // namespace tpcgcn::data

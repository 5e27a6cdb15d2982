#include "tpcgcn/data/split.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tpcgcn/data/threads_io.hpp"
#include "tpcgcn/error.hpp"
#include "tpcgcn/tensor/checkpoint.hpp"
#include "tpcgcn/tensor/rng.hpp"

namespace tpcgcn::data {

using nlohmann::json;

std::string_view to_string(Fold f) {
  switch (f) {
    case Fold::Train:
      return "train";
    case Fold::Val:
      return "val";
    case Fold::Test:
      return "test";
  }
  return "?";
}

Fold parse_fold(std::string_view s) {
  if (s == "train") return Fold::Train;
  if (s == "val") return Fold::Val;
  if (s == "test") return Fold::Test;
  throw ValidationError("unknown fold '" + std::string(s) + "' (train|val|test)");
}

std::string_view to_string(SplitMode m) {
  return m == SplitMode::IntraTopic ? "intra" : "inter";
}

SplitMode parse_split_mode(std::string_view s) {
  if (s == "intra") return SplitMode::IntraTopic;
  if (s == "inter") return SplitMode::InterTopic;
  throw ValidationError("unknown split mode '" + std::string(s) + "' (intra|inter)");
}

SplitRatios SplitRatios::parse(std::string_view text) {
  SplitRatios r;
  std::string s(text);
  std::replace(s.begin(), s.end(), ':', ' ');
  std::istringstream in(s);
  for (int& p : r.parts) {
    if (!(in >> p) || p <= 0) {
      throw ValidationError("ratios must be three positive integers A:B:C, got '" +
                            std::string(text) + "'");
    }
  }
  std::string rest;
  if (in >> rest) throw ValidationError("ratios must have exactly three parts");
  return r;
}

std::vector<std::string> SplitSpec::ids(Fold f) const {
  std::vector<std::string> out;
  for (const auto& [id, fold] : assignment)
    if (fold == f) out.push_back(id);
  return out;
}

std::array<std::size_t, 3> SplitSpec::counts() const {
  std::array<std::size_t, 3> c{0, 0, 0};
  for (const auto& [id, fold] : assignment) ++c[static_cast<int>(fold)];
  return c;
}

std::array<std::size_t, 3> apportion(std::size_t units, const SplitRatios& ratios,
                                     bool min_one_each) {
  for (int p : ratios.parts)
    if (p <= 0) throw ValidationError("split ratios must be positive");
  const auto total = static_cast<std::size_t>(
      std::accumulate(ratios.parts.begin(), ratios.parts.end(), 0));
  std::array<std::size_t, 3> counts{};
  std::array<std::size_t, 3> remainders{};
  std::size_t assigned = 0;
  for (int k = 0; k < 3; ++k) {
    const std::size_t num = units * static_cast<std::size_t>(ratios.parts[k]);
    counts[k] = num / total;
    remainders[k] = num % total;
    assigned += counts[k];
  }
  std::array<int, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return remainders[a] > remainders[b]; });
  for (std::size_t i = 0; assigned < units; ++i, ++assigned) ++counts[order[i % 3]];

  if (min_one_each && units >= 3) {
    for (int k = 0; k < 3; ++k) {
      if (counts[k] != 0) continue;
      const auto largest = static_cast<int>(
          std::max_element(counts.begin(), counts.end()) - counts.begin());
      --counts[largest];
      ++counts[k];
    }
  }
  return counts;
}

SplitSpec make_split(const std::vector<ThreadRecord>& records, SplitMode mode,
                     const SplitRatios& ratios, std::uint64_t seed) {
  SplitSpec spec;
  spec.mode = mode;
  spec.ratios = ratios;
  spec.seed = seed;
  const auto topics = group_by_topic(records);
  const tensor::SeededRng base(seed);

  auto assign = [&](std::vector<std::string>& units, const std::array<std::size_t, 3>& counts,
                    auto&& emit) {
    std::size_t pos = 0;
    for (int k = 0; k < 3; ++k)
      for (std::size_t i = 0; i < counts[k]; ++i) emit(units[pos++], static_cast<Fold>(k));
  };

  if (mode == SplitMode::IntraTopic) {
    for (const auto& [topic, posts] : topics) {
      std::vector<std::string> ids;
      for (const auto& p : posts) ids.push_back(p.post_id);
      auto rng = base.derive(topic);
      rng.shuffle(std::span(ids));
      assign(ids, apportion(ids.size(), ratios, false),
             [&](const std::string& id, Fold f) { spec.assignment[id] = f; });
    }
  } else {
    std::vector<std::string> names;
    for (const auto& [topic, posts] : topics) names.push_back(topic);
    if (names.size() < 3) {
      throw DataError("inter-topic split needs at least 3 topics, found " +
                      std::to_string(names.size()));
    }
    auto rng = base.derive("topics");
    rng.shuffle(std::span(names));
    assign(names, apportion(names.size(), ratios, true), [&](const std::string& topic, Fold f) {
      for (const auto& p : topics.at(topic)) spec.assignment[p.post_id] = f;
    });
  }

  const auto c = spec.counts();
  for (int k = 0; k < 3; ++k) {
    if (c[k] == 0) {
      throw DataError(std::string("too few posts to populate the ") +
                      std::string(to_string(static_cast<Fold>(k))) + " fold");
    }
  }
  return spec;
}

std::string split_to_json(const SplitSpec& split) {
  json j;
  j["mode"] = std::string(to_string(split.mode));
  j["seed"] = split.seed;
  j["ratios"] = split.ratios.parts;
  j["train"] = split.ids(Fold::Train);
  j["val"] = split.ids(Fold::Val);
  j["test"] = split.ids(Fold::Test);
  return j.dump(2) + "\n";
}

SplitSpec split_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("split file: malformed JSON: ") + e.what());
  }
  SplitSpec s;
  try {
    s.mode = parse_split_mode(j.at("mode").get<std::string>());
    s.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("ratios")) s.ratios.parts = j["ratios"].get<std::array<int, 3>>();
    for (auto f : {Fold::Train, Fold::Val, Fold::Test}) {
      for (const auto& id : j.at(std::string(to_string(f))).get<std::vector<std::string>>()) {
        if (!s.assignment.emplace(id, f).second) {
          throw DataError("split file: post '" + id + "' appears in more than one fold");
        }
      }
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("split file: ") + e.what());
  }
  return s;
}

SplitSpec load_split(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open split file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return split_from_json(ss.str());
}

void write_split(const SplitSpec& split, const std::filesystem::path& path) {
  tensor::write_file_atomically(path, split_to_json(split));
}

}  // namespace tpcgcn::data

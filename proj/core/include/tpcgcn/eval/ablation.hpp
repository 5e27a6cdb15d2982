#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tpcgcn/data/dataset.hpp"
#include "tpcgcn/data/split.hpp"
#include "tpcgcn/eval/metrics.hpp"
#include "tpcgcn/graph/ablation.hpp"
#include "tpcgcn/model/model_io.hpp"
#include "tpcgcn/train/config.hpp"
#include "tpcgcn/train/trainer.hpp"

namespace tpcgcn::eval {

enum class ModelFamily { TpcGcn, DtpcGcn };
std::string_view to_string(ModelFamily f);
ModelFamily parse_model_family(std::string_view s);

// A graph/feature ablation, or one DTPC branch on its own.
struct AblationSpec {
  std::string name;
  graph::AblationVariant variant = graph::AblationVariant::Full;
  std::optional<model::BranchId> branch_only;
};

// full, drop-topic, drop-comments, rand-topic, rand-post, rand-comment,
// u-branch, r-branch
AblationSpec parse_ablation(std::string_view name);
std::vector<std::string> ablation_names();

// The ablated inputs. The originals are not modified.
struct AblatedData {
  data::Corpus corpus;
  data::EmbeddingTable embeddings;
};
AblatedData ablate_inputs(const AblationSpec& spec, const data::Corpus& corpus,
                          const data::EmbeddingTable& embeddings, std::uint64_t seed);

struct AblationResult {
  Metrics test;
  model::AnyModel model;
  train::TrainHistory history;
};

// Builds the ablated inputs, trains per config and scores the test fold.
AblationResult run_ablation(const AblationSpec& spec, ModelFamily family,
                            const data::Corpus& corpus, const data::EmbeddingTable& embeddings,
                            const data::SplitSpec& split, const train::TrainConfig& config);

}  // namespace tpcgcn::eval

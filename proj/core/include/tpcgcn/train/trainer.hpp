#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tpcgcn/data/dataset.hpp"
#include "tpcgcn/data/embeddings.hpp"
#include "tpcgcn/data/split.hpp"
#include "tpcgcn/model/batch.hpp"
#include "tpcgcn/model/dtpcgcn.hpp"
#include "tpcgcn/model/tpcgcn.hpp"
#include "tpcgcn/train/config.hpp"

namespace tpcgcn::train {

struct EpochRecord {
  std::string stage;  // "tpc", "stage1", "stage2", "stage3"
  int epoch = 0;
  std::optional<std::string> branch;
  std::optional<double> loss_c;
  std::optional<double> loss_t;
  std::optional<double> val_metric;  // the stage's selection score
  std::optional<double> val_topic_acc;
};

struct BestPointer {
  std::string stage;
  std::optional<std::string> branch;
  int epoch = 0;  // 0 when no epoch ran
  std::optional<double> score;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  std::vector<BestPointer> best;
  std::vector<std::string> warnings;
};

// One JSON object per epoch: {stage, epoch, branch?, L_c, L_t, val_metric, ...}.
std::string history_to_jsonl(const TrainHistory& history);

// Scales the gradients of the non-frozen parameters so their global L2 norm
// is at most max_norm. Returns the factor applied (1 when under the limit).
double clip_gradients(std::span<tensor::Parameter* const> params, double max_norm);

// The topic-loss gradient a branch applies: as is for R, negated for U.
tensor::Matrix signed_topic_gradient(const tensor::Matrix& grad, model::BranchId branch);

// Topic-only forward over `rows`, every row labelled `topic`, followed by the
// signed backward pass into the branch's reduction, first layer and topic
// head. Returns the unsigned topic loss. Gradients are not clipped.
double topic_loss_backward(const model::GraphBatch& batch, model::BranchModel& branch,
                           std::span<const std::size_t> rows, int topic);

struct TpcTrainResult {
  model::TpcGcnModel model;
  TrainHistory history;
};

struct DtpcTrainResult {
  model::DtpcGcnModel model;
  TrainHistory history;
  std::vector<std::string> topics;  // topic head classes, in index order
};

struct BranchTrainResult {
  model::BranchModel model;
  TrainHistory history;
  std::vector<std::string> topics;
};

TpcTrainResult train_tpcgcn(const data::Corpus& corpus, const data::EmbeddingTable& embeddings,
                            const data::SplitSpec& split, const TrainConfig& config);

// Stage 1 (topic task, first layer), stage 2 (full branches) and stage 3
// (attention and final head on frozen branches).
DtpcTrainResult train_dtpcgcn(const data::Corpus& corpus,
                              const data::EmbeddingTable& embeddings,
                              const data::SplitSpec& split, const TrainConfig& config);

// Stages 1 and 2 for one branch alone; it classifies with its own head.
BranchTrainResult train_branch_only(const data::Corpus& corpus,
                                    const data::EmbeddingTable& embeddings,
                                    const data::SplitSpec& split, const TrainConfig& config,
                                    model::BranchId branch);

// Rows of the batch's post list per fold. Throws DataError for a post the
// split does not cover.
std::array<std::vector<std::size_t>, 3> fold_rows(const model::GraphBatch& batch,
                                                  const data::SplitSpec& split);

}  // namespace tpcgcn::train

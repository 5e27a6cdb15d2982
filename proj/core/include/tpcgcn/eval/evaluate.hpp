#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "tpcgcn/data/dataset.hpp"
#include "tpcgcn/data/split.hpp"
#include "tpcgcn/eval/metrics.hpp"
#include "tpcgcn/model/model_io.hpp"

namespace tpcgcn::eval {

struct PostPrediction {
  std::string post_id;
  std::string topic;
  int label = -1;
  int predicted = 0;
  double prob_controversial = 0.0;
};

// Worker count for evaluation: TPCGCN_THREADS when set to a positive
// integer, otherwise the hardware concurrency (at least 1).
std::size_t eval_threads();

// Predictions for the posts of one fold, graph by graph in corpus order.
// Graphs are evaluated on up to `threads` workers; the result does not
// depend on the worker count.
std::vector<PostPrediction> predict_fold(const model::AnyModel& m, const data::Corpus& corpus,
                                         const data::EmbeddingTable& embeddings,
                                         const data::SplitSpec& split, data::Fold fold,
                                         std::size_t threads = eval_threads());

// Throws ValidationError when the fold holds no posts.
Metrics evaluate(const model::AnyModel& m, const data::Corpus& corpus,
                 const data::EmbeddingTable& embeddings, const data::SplitSpec& split,
                 data::Fold fold, std::size_t threads = eval_threads());

Metrics metrics_of(const std::vector<PostPrediction>& predictions);

// Aligned plain-text table, one row per method: Avg. P, Avg. R, Avg. F1,
// Acc, then P/R/F1 per class.
std::string render_table(const std::vector<std::pair<std::string, Metrics>>& rows);

}  // namespace tpcgcn::eval

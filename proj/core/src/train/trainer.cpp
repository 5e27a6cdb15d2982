#include "tpcgcn/train/trainer.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <nlohmann/json.hpp>

#include "tpcgcn/error.hpp"
#include "tpcgcn/eval/metrics.hpp"
#include "tpcgcn/graph/ablation.hpp"
#include "tpcgcn/tensor/adam.hpp"
#include "tpcgcn/tensor/ops.hpp"

namespace tpcgcn::train {

using model::BranchId;
using model::GraphBatch;
using tensor::Matrix;
using tensor::ParameterList;
using tensor::SeededRng;

std::string history_to_jsonl(const TrainHistory& history) {
  auto opt = [](const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  std::string out;
  for (const auto& e : history.epochs) {
    nlohmann::ordered_json j;
    j["stage"] = e.stage;
    j["epoch"] = e.epoch;
    if (e.branch) j["branch"] = *e.branch;
    j["L_c"] = opt(e.loss_c);
    j["L_t"] = opt(e.loss_t);
    j["val_metric"] = opt(e.val_metric);
    if (e.val_topic_acc) j["val_topic_acc"] = *e.val_topic_acc;
    out += j.dump();
    out += '\n';
  }
  return out;
}

double clip_gradients(std::span<tensor::Parameter* const> params, double max_norm) {
  if (!(max_norm > 0.0)) throw ValidationError("clip_gradients: max_norm must be > 0");
  double sq = 0.0;
  for (const auto* p : params) {
    if (p->frozen) continue;
    for (double g : p->grad.data()) sq += g * g;
  }
  const double norm = std::sqrt(sq);
  if (!std::isfinite(norm)) throw NumericError("clip_gradients: gradient norm is not finite");
  if (norm <= max_norm) return 1.0;
  const double scale = max_norm / norm;
  for (auto* p : params)
    if (!p->frozen) p->grad *= scale;
  return scale;
}

Matrix signed_topic_gradient(const Matrix& grad, BranchId branch) {
  if (branch == BranchId::R) return grad;
  Matrix out = grad;
  out *= -1.0;
  return out;
}

double topic_loss_backward(const GraphBatch& batch, model::BranchModel& branch,
                           std::span<const std::size_t> rows, int topic) {
  SeededRng unused(0);
  const auto fwd = model::branch_forward(batch, branch, unused, false, model::BranchDepth::TopicOnly);
  const std::vector<int> labels(rows.size(), topic);
  const auto ml = model::masked_cross_entropy(fwd.topic_logits, rows, labels);
  model::branch_backward(batch, branch, fwd, signed_topic_gradient(ml.grad, branch.id), {});
  return ml.loss;
}

std::array<std::vector<std::size_t>, 3> fold_rows(const GraphBatch& batch,
                                                  const data::SplitSpec& split) {
  std::array<std::vector<std::size_t>, 3> rows;
  for (std::size_t i = 0; i < batch.post_ids.size(); ++i) {
    const auto it = split.assignment.find(batch.post_ids[i]);
    if (it == split.assignment.end())
      throw DataError("split does not assign post '" + batch.post_ids[i] + "'");
    rows[static_cast<int>(it->second)].push_back(i);
  }
  return rows;
}

namespace {

constexpr int kTrain = static_cast<int>(data::Fold::Train);
constexpr int kVal = static_cast<int>(data::Fold::Val);

struct Prepared {
  std::vector<GraphBatch> eval;   // full graphs
  std::vector<GraphBatch> train;  // graphs seen by the optimizer
  std::vector<std::array<std::vector<std::size_t>, 3>> eval_rows;
  std::vector<std::vector<std::size_t>> train_rows;
  std::vector<std::size_t> trainable;  // batch indices with training posts
  std::vector<int> topic;              // topic class per batch, -1 if unseen in training
  std::vector<std::string> topics;
};

std::vector<int> labels_at(const GraphBatch& b, std::span<const std::size_t> rows) {
  std::vector<int> out;
  out.reserve(rows.size());
  for (auto r : rows) out.push_back(b.labels[r]);
  return out;
}

graph::TpcGraph inductive_graph(const graph::TpcGraph& g, const data::SplitSpec& split) {
  std::vector<bool> keep(g.node_count(), true);
  for (const auto& slot : g.posts) {
    const auto it = split.assignment.find(g.nodes[slot.position].id);
    if (it != split.assignment.end() && it->second == data::Fold::Train) continue;
    keep[slot.position] = false;
    for (auto c : slot.comments) keep[c] = false;
  }
  return graph::induced_subgraph(g, keep);
}

Prepared prepare(const data::Corpus& corpus, const data::EmbeddingTable& embeddings,
                 const data::SplitSpec& split, const TrainConfig& config, TrainHistory& history) {
  config.validate();
  Prepared p;
  std::map<std::string, int> topic_index;
  for (const auto& g : corpus.graphs) {
    p.eval.push_back(model::make_batch(g, embeddings, corpus.labels));
    p.eval_rows.push_back(fold_rows(p.eval.back(), split));
    GraphBatch tb = config.inductive
                        ? model::make_batch(inductive_graph(g, split), embeddings, corpus.labels)
                        : p.eval.back();
    p.train_rows.push_back(fold_rows(tb, split)[kTrain]);
    p.train.push_back(std::move(tb));
    const std::size_t i = p.eval.size() - 1;
    if (p.train_rows[i].empty()) {
      history.warnings.push_back("topic '" + g.topic + "' has no training posts; skipped");
      continue;
    }
    for (int y : labels_at(p.train[i], p.train_rows[i]))
      if (y != 0 && y != 1) throw DataError("training post without a binary label");
    p.trainable.push_back(i);
    topic_index.emplace(g.topic, 0);
  }
  if (p.trainable.empty()) throw ValidationError("no graph has posts in the training fold");
  int k = 0;
  for (auto& [name, idx] : topic_index) {
    idx = k++;
    p.topics.push_back(name);
  }
  for (const auto& b : p.eval) {
    const auto it = topic_index.find(b.topic);
    p.topic.push_back(it == topic_index.end() ? -1 : it->second);
  }
  return p;
}

tensor::AdamConfig adam_config(const TrainConfig& c) {
  return {c.lr, c.adam_beta1, c.adam_beta2, c.adam_eps};
}

struct StepLosses {
  std::optional<double> c;
  std::optional<double> t;
};

struct Validation {
  std::optional<double> score;
  std::optional<double> topic_acc;
};

struct Stage {
  std::string name;
  std::optional<std::string> branch;
  int epochs = 0;
  ParameterList params;
  SeededRng order;
  std::function<StepLosses(std::size_t)> step;
  std::function<Validation()> validate;
};

void run_stage(Stage& s, const Prepared& p, const TrainConfig& config, TrainHistory& history) {
  tensor::AdamState state;
  const auto adam = adam_config(config);
  std::optional<double> best;
  int best_epoch = 0;
  std::vector<Matrix> snapshot;
  tensor::zero_grads(s.params);
  for (int epoch = 1; epoch <= s.epochs; ++epoch) {
    std::vector<std::size_t> order = p.trainable;
    s.order.shuffle(std::span<std::size_t>(order));
    double sum_c = 0.0, sum_t = 0.0;
    std::size_t n_c = 0, n_t = 0;
    for (auto g : order) {
      const StepLosses l = s.step(g);
      if (l.c) { sum_c += *l.c; ++n_c; }
      if (l.t) { sum_t += *l.t; ++n_t; }
      if (config.grad_clip_norm) clip_gradients(s.params, *config.grad_clip_norm);
      tensor::adam_step(s.params, state, adam);
    }
    const Validation v = s.validate();
    EpochRecord rec{s.name, epoch, s.branch, std::nullopt, std::nullopt, v.score, v.topic_acc};
    if (n_c) rec.loss_c = sum_c / static_cast<double>(n_c);
    if (n_t) rec.loss_t = sum_t / static_cast<double>(n_t);
    history.epochs.push_back(rec);
    if (v.score && (!best || *v.score > *best)) {
      best = v.score;
      best_epoch = epoch;
      if (config.restore_best) snapshot = tensor::snapshot_values(s.params);
    }
  }
  if (best && config.restore_best) tensor::restore_values(s.params, snapshot);
  history.best.push_back({s.name, s.branch, best ? best_epoch : s.epochs, best});
}

double selection_score(const TrainConfig& c, const std::vector<int>& preds,
                       const std::vector<int>& labels) {
  const auto m = eval::compute_metrics(preds, labels);
  return c.selection_metric == SelectionMetric::Accuracy ? m.acc : m.avg_f1;
}

// Selection metric over the validation posts of every graph, dropout off.
template <typename ProbsFn>
std::optional<double> controversy_validation(const Prepared& p, const TrainConfig& config,
                                             ProbsFn&& probs_of) {
  std::vector<int> preds, labels;
  for (std::size_t i = 0; i < p.eval.size(); ++i) {
    const auto& rows = p.eval_rows[i][kVal];
    if (rows.empty()) continue;
    const Matrix probs = probs_of(p.eval[i]);
    const auto am = tensor::argmax_rows(probs);
    for (auto r : rows) {
      preds.push_back(static_cast<int>(am[r]));
      labels.push_back(p.eval[i].labels[r]);
    }
  }
  if (labels.empty()) return std::nullopt;
  return selection_score(config, preds, labels);
}

double sign_of(BranchId b) { return b == BranchId::U ? -1.0 : 1.0; }

// Validation topic loss, controversy loss and topic accuracy of a branch,
// weighted by post count.
struct BranchValidation {
  std::size_t n = 0;
  double loss_t = 0.0;
  double loss_c = 0.0;
  double topic_acc = 0.0;
};

BranchValidation validate_branch(const Prepared& p, const model::BranchModel& branch,
                                 model::BranchDepth depth) {
  BranchValidation v;
  std::size_t correct = 0;
  SeededRng unused(0);
  for (std::size_t i = 0; i < p.eval.size(); ++i) {
    const auto& rows = p.eval_rows[i][kVal];
    if (rows.empty() || p.topic[i] < 0) continue;
    const auto fwd = model::branch_forward(p.eval[i], branch, unused, false, depth);
    const std::vector<int> topics(rows.size(), p.topic[i]);
    const double n = static_cast<double>(rows.size());
    v.loss_t += model::masked_cross_entropy(fwd.topic_logits, rows, topics).loss * n;
    if (depth == model::BranchDepth::Full) {
      v.loss_c += model::masked_cross_entropy(fwd.controversy_logits, rows,
                                              labels_at(p.eval[i], rows))
                      .loss * n;
    }
    const auto am = tensor::argmax_rows(fwd.topic_logits);
    for (auto r : rows) correct += static_cast<int>(am[r]) == p.topic[i] ? 1 : 0;
    v.n += rows.size();
  }
  if (v.n) {
    const double n = static_cast<double>(v.n);
    v.loss_t /= n;
    v.loss_c /= n;
    v.topic_acc = static_cast<double>(correct) / n;
  }
  return v;
}

void train_branch_stages(model::BranchModel& branch, const Prepared& p, const TrainConfig& config,
                         const SeededRng& root, TrainHistory& history) {
  const std::string name(model::to_string(branch.id));
  const double sign = sign_of(branch.id);
  SeededRng dropout_rng = root.derive("dropout." + name);

  Stage s1{"stage1", name, config.stage_epochs[0], branch.topic_parameters(),
           root.derive("order.stage1." + name), {}, {}};
  s1.step = [&](std::size_t g) {
    return StepLosses{std::nullopt,
                      topic_loss_backward(p.train[g], branch, p.train_rows[g], p.topic[g])};
  };
  s1.validate = [&]() {
    const auto v = validate_branch(p, branch, model::BranchDepth::TopicOnly);
    if (!v.n) return Validation{};
    return Validation{-sign * v.loss_t, v.topic_acc};
  };
  run_stage(s1, p, config, history);

  if (config.freeze_stage1) tensor::set_frozen(branch.topic_parameters(), true);
  const double beta = config.topic_loss_weight;
  Stage s2{"stage2", name, config.stage_epochs[1], branch.parameters(),
           root.derive("order.stage2." + name), {}, {}};
  s2.step = [&](std::size_t g) {
    const auto& b = p.train[g];
    const auto& rows = p.train_rows[g];
    const auto fwd = model::branch_forward(b, branch, dropout_rng, true);
    const auto lc = model::masked_cross_entropy(fwd.controversy_logits, rows, labels_at(b, rows));
    const std::vector<int> topics(rows.size(), p.topic[g]);
    const auto lt = model::masked_cross_entropy(fwd.topic_logits, rows, topics);
    Matrix d_topic;
    if (beta != 0.0) {
      d_topic = signed_topic_gradient(lt.grad, branch.id);
      d_topic *= beta;
    }
    model::branch_backward(b, branch, fwd, d_topic, lc.grad);
    return StepLosses{lc.loss, lt.loss};
  };
  s2.validate = [&]() {
    const auto v = validate_branch(p, branch, model::BranchDepth::Full);
    if (!v.n) return Validation{};
    return Validation{-(v.loss_c + beta * sign * v.loss_t), v.topic_acc};
  };
  run_stage(s2, p, config, history);
}

}  // namespace

TpcTrainResult train_tpcgcn(const data::Corpus& corpus, const data::EmbeddingTable& embeddings,
                            const data::SplitSpec& split, const TrainConfig& config) {
  TpcTrainResult out;
  const Prepared p = prepare(corpus, embeddings, split, config, out.history);
  const SeededRng root(config.seed);
  out.model = model::TpcGcnModel(
      {embeddings.dim(), config.reduced_dim, config.hidden_dim, 2}, config.dropout);
  out.model.init(root.derive("init").seed());
  SeededRng dropout_rng = root.derive("dropout");

  Stage s{"tpc", std::nullopt, config.epochs, out.model.parameters(), root.derive("order"), {}, {}};
  s.step = [&](std::size_t g) {
    const auto& b = p.train[g];
    const auto& rows = p.train_rows[g];
    const auto fwd = model::tpcgcn_forward(b, out.model, dropout_rng, true);
    const auto lc = model::masked_cross_entropy(fwd.logits, rows, labels_at(b, rows));
    model::tpcgcn_backward(b, out.model, fwd, lc.grad);
    return StepLosses{lc.loss, std::nullopt};
  };
  s.validate = [&]() {
    SeededRng unused(0);
    return Validation{controversy_validation(p, config, [&](const GraphBatch& b) {
      return model::tpcgcn_forward(b, out.model, unused, false).probs;
    }), std::nullopt};
  };
  run_stage(s, p, config, out.history);
  return out;
}

namespace {

void require_two_topics(const Prepared& p) {
  if (p.topics.size() < 2) {
    throw ValidationError("dtpcgcn: >=2 topics required in the training fold, found " +
                          std::to_string(p.topics.size()));
  }
}

model::BranchDims branch_dims(const TrainConfig& c, std::size_t raw, std::size_t topics) {
  return {raw, c.reduced_dim, c.branch_hidden_dim, c.branch_fused_dim, topics, 2};
}

}  // namespace

DtpcTrainResult train_dtpcgcn(const data::Corpus& corpus,
                              const data::EmbeddingTable& embeddings,
                              const data::SplitSpec& split, const TrainConfig& config) {
  DtpcTrainResult out;
  const Prepared p = prepare(corpus, embeddings, split, config, out.history);
  require_two_topics(p);
  out.topics = p.topics;
  const SeededRng root(config.seed);
  out.model = model::DtpcGcnModel(branch_dims(config, embeddings.dim(), p.topics.size()),
                                  config.attn_dim, config.branch_dropout);
  out.model.init(root.derive("init").seed());

  // The branches only meet in the attention stage, so they train one after
  // the other.
  train_branch_stages(out.model.r, p, config, root, out.history);
  train_branch_stages(out.model.u, p, config, root, out.history);

  tensor::set_frozen(out.model.u.parameters(), true);
  tensor::set_frozen(out.model.r.parameters(), true);
  SeededRng unused(0);
  Stage s3{"stage3", std::nullopt, config.stage_epochs[2], out.model.fusion_parameters(),
           root.derive("order.stage3"), {}, {}};
  s3.step = [&](std::size_t g) {
    const auto& b = p.train[g];
    const auto& rows = p.train_rows[g];
    const auto fwd = model::dtpcgcn_forward(b, out.model, unused, false);
    const auto lc = model::masked_cross_entropy(fwd.logits, rows, labels_at(b, rows));
    model::dtpcgcn_backward(b, out.model, fwd, lc.grad, false);
    return StepLosses{lc.loss, std::nullopt};
  };
  s3.validate = [&]() {
    return Validation{controversy_validation(p, config, [&](const GraphBatch& b) {
      return model::dtpcgcn_forward(b, out.model, unused, false).probs;
    }), std::nullopt};
  };
  run_stage(s3, p, config, out.history);
  return out;
}

BranchTrainResult train_branch_only(const data::Corpus& corpus,
                                    const data::EmbeddingTable& embeddings,
                                    const data::SplitSpec& split, const TrainConfig& config,
                                    BranchId branch) {
  BranchTrainResult out;
  const Prepared p = prepare(corpus, embeddings, split, config, out.history);
  require_two_topics(p);
  out.topics = p.topics;
  const SeededRng root(config.seed);
  out.model = model::BranchModel(branch, branch_dims(config, embeddings.dim(), p.topics.size()),
                                 config.branch_dropout);
  SeededRng init = root.derive("init").derive(model::to_string(branch));
  out.model.init(init);
  train_branch_stages(out.model, p, config, root, out.history);
  return out;
}

}  // namespace tpcgcn::train

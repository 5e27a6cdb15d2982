#include "tpcgcn/train/config.hpp"

#include <nlohmann/json.hpp>
#include <set>

#include "tpcgcn/bytes.hpp"
#include "tpcgcn/error.hpp"

namespace tpcgcn::train {

using nlohmann::json;

std::string_view to_string(SelectionMetric m) {
  return m == SelectionMetric::Accuracy ? "accuracy" : "macro_f1";
}

SelectionMetric parse_selection_metric(std::string_view s) {
  if (s == "accuracy" || s == "acc") return SelectionMetric::Accuracy;
  if (s == "macro_f1" || s == "f1") return SelectionMetric::MacroF1;
  throw ValidationError("unknown selection metric '" + std::string(s) +
                        "' (expected accuracy or macro_f1)");
}

void TrainConfig::validate() const {
  if (!(lr >= 0.0)) throw ValidationError("config: lr must be >= 0");
  if (epochs < 1) throw ValidationError("config: epochs must be >= 1");
  for (double d : {dropout, branch_dropout})
    if (!(d >= 0.0 && d < 1.0)) throw ValidationError("config: dropout must lie in [0, 1)");
  for (auto d : {reduced_dim, hidden_dim, branch_hidden_dim, branch_fused_dim, attn_dim,
                 fallback_dim})
    if (d == 0) throw ValidationError("config: layer dimensions must be positive");
  for (int e : stage_epochs)
    if (e < 0) throw ValidationError("config: stage_epochs must be >= 0");
  if (!(topic_loss_weight >= 0.0)) throw ValidationError("config: topic_loss_weight must be >= 0");
  if (grad_clip_norm && !(*grad_clip_norm > 0.0))
    throw ValidationError("config: grad_clip_norm must be > 0 or null");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0))
    throw ValidationError("config: Adam betas must lie in [0, 1)");
  if (!(adam_eps > 0.0)) throw ValidationError("config: adam_eps must be > 0");
}

namespace {

const std::set<std::string> kKeys{
    "lr",          "epochs",        "dropout",           "branch_dropout",
    "reduced_dim", "hidden_dim",    "branch_hidden_dim", "branch_fused_dim",
    "attn_dim",    "seed",          "stage_epochs",      "topic_loss_weight",
    "grad_clip_norm", "selection_metric", "adam_beta1",  "adam_beta2",
    "adam_eps",    "inductive",     "freeze_stage1",     "restore_best",
    "rebuild_replies", "max_comments", "comment_window_seconds", "fallback_dim"};

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

TrainConfig config_from_json(const std::string& text) {
  TrainConfig c;
  try {
    const json j = json::parse(text);
    if (!j.is_object()) throw ValidationError("config: expected a JSON object");
    for (const auto& [k, _] : j.items())
      if (!kKeys.contains(k)) throw ValidationError("config: unknown field '" + k + "'");
    read(j, "lr", c.lr);
    read(j, "epochs", c.epochs);
    read(j, "dropout", c.dropout);
    read(j, "branch_dropout", c.branch_dropout);
    read(j, "reduced_dim", c.reduced_dim);
    read(j, "hidden_dim", c.hidden_dim);
    read(j, "branch_hidden_dim", c.branch_hidden_dim);
    read(j, "branch_fused_dim", c.branch_fused_dim);
    read(j, "attn_dim", c.attn_dim);
    read(j, "seed", c.seed);
    read(j, "stage_epochs", c.stage_epochs);
    read(j, "topic_loss_weight", c.topic_loss_weight);
    if (j.contains("grad_clip_norm")) {
      const auto& g = j.at("grad_clip_norm");
      c.grad_clip_norm = g.is_null() ? std::nullopt : std::optional<double>(g.get<double>());
    }
    if (j.contains("selection_metric"))
      c.selection_metric = parse_selection_metric(j.at("selection_metric").get<std::string>());
    read(j, "adam_beta1", c.adam_beta1);
    read(j, "adam_beta2", c.adam_beta2);
    read(j, "adam_eps", c.adam_eps);
    read(j, "inductive", c.inductive);
    read(j, "freeze_stage1", c.freeze_stage1);
    read(j, "restore_best", c.restore_best);
    read(j, "rebuild_replies", c.prep.rebuild_replies);
    if (j.contains("max_comments") && !j.at("max_comments").is_null())
      c.prep.truncation.max_count = j.at("max_comments").get<std::size_t>();
    if (j.contains("comment_window_seconds") && !j.at("comment_window_seconds").is_null())
      c.prep.truncation.window_seconds = j.at("comment_window_seconds").get<std::int64_t>();
    read(j, "fallback_dim", c.fallback_dim);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

std::string config_to_json(const TrainConfig& c) {
  nlohmann::ordered_json j;
  j["lr"] = c.lr;
  j["epochs"] = c.epochs;
  j["dropout"] = c.dropout;
  j["branch_dropout"] = c.branch_dropout;
  j["reduced_dim"] = c.reduced_dim;
  j["hidden_dim"] = c.hidden_dim;
  j["branch_hidden_dim"] = c.branch_hidden_dim;
  j["branch_fused_dim"] = c.branch_fused_dim;
  j["attn_dim"] = c.attn_dim;
  j["seed"] = c.seed;
  j["stage_epochs"] = c.stage_epochs;
  j["topic_loss_weight"] = c.topic_loss_weight;
  j["grad_clip_norm"] = c.grad_clip_norm ? json(*c.grad_clip_norm) : json(nullptr);
  j["selection_metric"] = to_string(c.selection_metric);
  j["adam_beta1"] = c.adam_beta1;
  j["adam_beta2"] = c.adam_beta2;
  j["adam_eps"] = c.adam_eps;
  j["inductive"] = c.inductive;
  j["freeze_stage1"] = c.freeze_stage1;
  j["restore_best"] = c.restore_best;
  j["rebuild_replies"] = c.prep.rebuild_replies;
  j["max_comments"] =
      c.prep.truncation.max_count ? json(*c.prep.truncation.max_count) : json(nullptr);
  j["comment_window_seconds"] =
      c.prep.truncation.window_seconds ? json(*c.prep.truncation.window_seconds) : json(nullptr);
  j["fallback_dim"] = c.fallback_dim;
  return j.dump(2);
}

TrainConfig load_config(const std::filesystem::path& path) {
  const auto bytes = bytes::read_file(path);
  return config_from_json(std::string(bytes.begin(), bytes.end()));
}

}  // namespace tpcgcn::train

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "tpcgcn/data/dataset.hpp"

namespace tpcgcn::train {

enum class SelectionMetric { Accuracy, MacroF1 };
std::string_view to_string(SelectionMetric m);
SelectionMetric parse_selection_metric(std::string_view s);

struct TrainConfig {
  double lr = 1e-4;
  int epochs = 100;  // single-stage model
  double dropout = 0.35;
  double branch_dropout = 0.4;
  std::size_t reduced_dim = 300;
  std::size_t hidden_dim = 100;
  std::size_t branch_hidden_dim = 32;
  std::size_t branch_fused_dim = 16;
  std::size_t attn_dim = 16;
  std::uint64_t seed = 0;
  std::array<int, 3> stage_epochs{30, 70, 50};
  double topic_loss_weight = 1.0;
  std::optional<double> grad_clip_norm = 5.0;
  SelectionMetric selection_metric = SelectionMetric::Accuracy;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  // Drop non-train posts and their comments from the graphs seen in training.
  bool inductive = false;
  // Keep reduction, first layer and topic head fixed after stage 1.
  bool freeze_stage1 = false;
  bool restore_best = true;
  data::PrepOptions prep;
  std::size_t fallback_dim = 768;

  // Throws ValidationError describing the first bad field.
  void validate() const;
};

// JSON object with the field names above; absent fields keep their defaults,
// unknown fields are rejected. "grad_clip_norm": null disables clipping.
TrainConfig config_from_json(const std::string& text);
std::string config_to_json(const TrainConfig& config);
TrainConfig load_config(const std::filesystem::path& path);

}  // namespace tpcgcn::train

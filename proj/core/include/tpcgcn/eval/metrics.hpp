#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>

namespace tpcgcn::eval {

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;  // true instances of the class
  bool operator==(const ClassMetrics&) const = default;
};

// Binary controversy metrics. Empty denominators give 0 (P, R and F1).
struct Metrics {
  double avg_p = 0.0;
  double avg_r = 0.0;
  double avg_f1 = 0.0;
  double acc = 0.0;
  std::array<ClassMetrics, 2> per_class{};
  std::size_t n = 0;
  bool operator==(const Metrics&) const = default;
};

// Throws ValidationError on a length mismatch, empty input or a label
// outside {0, 1}.
Metrics compute_metrics(std::span<const int> predictions, std::span<const int> labels);

std::string metrics_to_json(const Metrics& m);
Metrics metrics_from_json(const std::string& text);

}  // namespace tpcgcn::eval

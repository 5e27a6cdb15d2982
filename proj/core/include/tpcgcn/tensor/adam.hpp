#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>

#include "tpcgcn/tensor/matrix.hpp"
#include "tpcgcn/tensor/parameter.hpp"

namespace tpcgcn::tensor {

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// First/second moments keyed by parameter name, plus the shared step count.
struct AdamState {
  struct Moments {
    Matrix m;
    Matrix v;
  };
  std::map<std::string, Moments> moments;
  std::int64_t step = 0;
};

// One bias-corrected Adam update of every non-frozen parameter. Frozen
// parameters and their moments are left untouched. All gradients are zeroed
// afterwards.
void adam_step(std::span<Parameter* const> params, AdamState& state,
               const AdamConfig& config);

}  // namespace tpcgcn::tensor

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>

#include "tpcgcn/tensor/parameter.hpp"

namespace tpcgcn::tensor {

struct GradCheckOptions {
  double epsilon = 1e-6;
  // Parameters with more entries than this are checked on an evenly strided
  // subset of coordinates.
  std::size_t max_coords_per_param = 64;
  // Denominator floor for the relative error |a - n| / max(|a|, |n|, floor),
  // so coordinates whose true gradient is ~0 are judged on absolute error.
  double relative_floor = 1e-7;
};

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::string worst_parameter;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t coords_checked = 0;
};

// The loss callback evaluates the loss at the current parameter values. When
// its argument is true it must also accumulate analytic gradients into the
// (pre-zeroed) grad buffers. It must be deterministic.
using LossFunction = std::function<double(bool compute_grad)>;

// Central differences against the analytic gradient, coordinate by
// coordinate. Frozen parameters are skipped. Throws NumericError on a
// non-finite loss.
GradCheckReport finite_diff_check(const LossFunction& loss_fn,
                                  std::span<Parameter* const> params,
                                  const GradCheckOptions& options = {});

}  // namespace tpcgcn::tensor

#include "tpcgcn/tensor/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "tpcgcn/error.hpp"

namespace tpcgcn::tensor {

namespace {

double checked(double loss) {
  if (!std::isfinite(loss)) throw NumericError("finite_diff_check: loss is not finite");
  return loss;
}

}  // namespace

GradCheckReport finite_diff_check(const LossFunction& loss_fn,
                                  std::span<Parameter* const> params,
                                  const GradCheckOptions& options) {
  zero_grads(params);
  checked(loss_fn(true));
  std::vector<Matrix> analytic;
  analytic.reserve(params.size());
  for (const Parameter* p : params) analytic.push_back(p->grad);
  zero_grads(params);

  GradCheckReport report;
  const double h = options.epsilon;
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    Parameter& p = *params[pi];
    if (p.frozen) continue;
    auto& w = p.value.data();
    const std::size_t n = w.size();
    const std::size_t stride =
        n <= options.max_coords_per_param
            ? 1
            : (n + options.max_coords_per_param - 1) / options.max_coords_per_param;
    for (std::size_t i = 0; i < n; i += stride) {
      const double saved = w[i];
      w[i] = saved + h;
      const double up = checked(loss_fn(false));
      w[i] = saved - h;
      const double down = checked(loss_fn(false));
      w[i] = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double a = analytic[pi].data()[i];
      const double denom =
          std::max({std::abs(a), std::abs(numeric), options.relative_floor});
      const double rel = std::abs(a - numeric) / denom;
      ++report.coords_checked;
      if (rel > report.max_relative_error || report.worst_parameter.empty()) {
        report.max_relative_error = std::max(rel, report.max_relative_error);
        if (rel >= report.max_relative_error) {
          report.worst_parameter = p.name;
          report.worst_index = i;
          report.worst_analytic = a;
          report.worst_numeric = numeric;
        }
      }
    }
  }
  return report;
}

}  // namespace tpcgcn::tensor

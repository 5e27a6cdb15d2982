#include "tpcgcn/tensor/parameter.hpp"

#include <cmath>

#include "tpcgcn/error.hpp"

namespace tpcgcn::tensor {

Parameter::Parameter(std::string name_, std::size_t rows, std::size_t cols)
    : name(std::move(name_)), value(rows, cols), grad(rows, cols) {}

Parameter Parameter::vector(std::string name, std::size_t n) {
  Parameter p(std::move(name), 1, n);
  p.rank = 1;
  return p;
}

void zero_grads(std::span<Parameter* const> params) {
  for (Parameter* p : params) p->zero_grad();
}

void set_frozen(std::span<Parameter* const> params, bool frozen) {
  for (Parameter* p : params) p->frozen = frozen;
}

double grad_norm(std::span<Parameter* const> params) {
  double sq = 0.0;
  for (const Parameter* p : params)
    for (double g : p->grad.data()) sq += g * g;
  return std::sqrt(sq);
}

void glorot_uniform(Parameter& p, SeededRng& rng) {
  const double fan_in = static_cast<double>(p.value.rows());
  const double fan_out = static_cast<double>(p.value.cols());
  const double a = std::sqrt(6.0 / (fan_in + fan_out));
  for (double& v : p.value.data()) v = rng.uniform(-a, a);
}

std::vector<Matrix> snapshot_values(std::span<Parameter* const> params) {
  std::vector<Matrix> out;
  out.reserve(params.size());
  for (const Parameter* p : params) out.push_back(p->value);
  return out;
}

void restore_values(std::span<Parameter* const> params, const std::vector<Matrix>& values) {
  if (values.size() != params.size()) {
    throw DimensionError("snapshot holds " + std::to_string(values.size()) +
                         " tensors for " + std::to_string(params.size()) + " parameters");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!params[i]->value.same_shape(values[i])) {
      throw DimensionError("snapshot shape mismatch for " + params[i]->name);
    }
    params[i]->value = values[i];
  }
}

}  // namespace tpcgcn::tensor

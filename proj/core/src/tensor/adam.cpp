#include "tpcgcn/tensor/adam.hpp"

#include <cmath>

#include "tpcgcn/error.hpp"

namespace tpcgcn::tensor {

void adam_step(std::span<Parameter* const> params, AdamState& state,
               const AdamConfig& config) {
  for (const Parameter* p : params) {
    if (!p->value.same_shape(p->grad)) {
      throw DimensionError("parameter " + p->name + " has value " +
                           p->value.shape_string() + " but grad " +
                           p->grad.shape_string());
    }
    const auto it = state.moments.find(p->name);
    if (it != state.moments.end() && !it->second.m.same_shape(p->value)) {
      throw DimensionError("optimizer state for " + p->name + " has shape " +
                           it->second.m.shape_string() + ", parameter is " +
                           p->value.shape_string());
    }
  }

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double bc1 = 1.0 - std::pow(config.beta1, t);
  const double bc2 = 1.0 - std::pow(config.beta2, t);

  for (Parameter* p : params) {
    if (!p->frozen) {
      auto [it, inserted] = state.moments.try_emplace(p->name);
      if (inserted) {
        it->second.m = Matrix(p->value.rows(), p->value.cols());
        it->second.v = Matrix(p->value.rows(), p->value.cols());
      }
      auto& m = it->second.m.data();
      auto& v = it->second.v.data();
      auto& w = p->value.data();
      const auto& g = p->grad.data();
      for (std::size_t i = 0; i < w.size(); ++i) {
        m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * g[i];
        v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * g[i] * g[i];
        const double m_hat = m[i] / bc1;
        const double v_hat = v[i] / bc2;
        w[i] -= config.lr * m_hat / (std::sqrt(v_hat) + config.eps);
      }
    }
    p->zero_grad();
  }
}

}  // namespace tpcgcn::tensor

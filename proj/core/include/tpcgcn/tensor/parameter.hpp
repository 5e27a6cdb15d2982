#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tpcgcn/tensor/matrix.hpp"
#include "tpcgcn/tensor/rng.hpp"

namespace tpcgcn::tensor {

// A learnable tensor with its gradient buffer. Vectors (rank 1) are stored
// as 1 x n rows; `rank` only affects serialization.
struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;
  bool frozen = false;
  int rank = 2;

  Parameter() = default;
  Parameter(std::string name, std::size_t rows, std::size_t cols);
  // A rank-1 parameter of length n.
  static Parameter vector(std::string name, std::size_t n);

  void zero_grad() { grad.fill(0.0); }
  void accumulate(const Matrix& g) { grad += g; }
};

// Non-owning, ordered view over the parameters of a model.
using ParameterList = std::vector<Parameter*>;

void zero_grads(std::span<Parameter* const> params);
void set_frozen(std::span<Parameter* const> params, bool frozen);
double grad_norm(std::span<Parameter* const> params);

// Glorot/Xavier uniform: U(-a, a), a = sqrt(6 / (fan_in + fan_out)).
void glorot_uniform(Parameter& p, SeededRng& rng);

// Value copies, used for best-epoch snapshots.
std::vector<Matrix> snapshot_values(std::span<Parameter* const> params);
void restore_values(std::span<Parameter* const> params, const std::vector<Matrix>& values);

}  // namespace tpcgcn::tensor

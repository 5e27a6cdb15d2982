#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tpcgcn/tensor/matrix.hpp"
#include "tpcgcn/tensor/rng.hpp"
#include "tpcgcn/tensor/sparse.hpp"

// Forward kernels and their hand-written backward counterparts. Every
// backward function takes the upstream gradient dL/dOut and returns (or
// accumulates) the gradient with respect to one input.
namespace tpcgcn::tensor {

// C = A * B. Each entry is accumulated in ascending k order.
Matrix matmul(const Matrix& a, const Matrix& b);
// dL/dA = dC * B^T
Matrix matmul_backward_lhs(const Matrix& grad_out, const Matrix& b);
// dL/dB = A^T * dC
Matrix matmul_backward_rhs(const Matrix& a, const Matrix& grad_out);

// C = S * D. Bit-identical to matmul(S.densify(), D).
Matrix spmm(const SparseMatrix& s, const Matrix& d);
// dL/dD = S^T * dC
Matrix spmm_transposed(const SparseMatrix& s, const Matrix& grad_out);

// Y = X + 1 * b, with b a 1 x cols row broadcast over every row.
Matrix add_row_bias(const Matrix& x, const Matrix& bias);
// Column sums of dY, the gradient of a broadcast bias.
Matrix bias_backward(const Matrix& grad_out);

Matrix relu(const Matrix& x);
// Masks by x > 0; the subgradient at 0 is 0.
Matrix relu_backward(const Matrix& x, const Matrix& grad_out);

Matrix tanh_elem(const Matrix& x);
// Takes the forward output y = tanh(x): dX = dY * (1 - y^2).
Matrix tanh_backward(const Matrix& y, const Matrix& grad_out);

// Row-wise softmax with max subtraction.
Matrix softmax_rows(const Matrix& logits);

struct CrossEntropyResult {
  double loss = 0.0;
  Matrix probs;
};

// Mean negative log-likelihood of `labels` under row-wise softmax.
CrossEntropyResult softmax_cross_entropy(const Matrix& logits,
                                         std::span<const int> labels);
// (probs - onehot(labels)) / n
Matrix softmax_cross_entropy_backward(const Matrix& probs,
                                      std::span<const int> labels);

// Inverted dropout. The mask holds the multiplier applied to each entry:
// 0 for dropped entries, 1/(1-rate) for survivors, 1 everywhere when inactive.
struct DropoutResult {
  Matrix output;
  Matrix mask;
};

DropoutResult dropout(const Matrix& x, double rate, SeededRng& rng, bool training);
Matrix dropout_backward(const Matrix& mask, const Matrix& grad_out);

Matrix hadamard(const Matrix& a, const Matrix& b);

// Rows of `x` selected by `indices`, in that order.
Matrix gather_rows(const Matrix& x, std::span<const std::size_t> indices);
// Adds row i of `rows` into row indices[i] of `target`.
void scatter_add_rows(Matrix& target, std::span<const std::size_t> indices,
                      const Matrix& rows);

std::vector<std::size_t> argmax_rows(const Matrix& x);

}  // namespace tpcgcn::tensor

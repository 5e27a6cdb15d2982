#include "tpcgcn/tensor/ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tpcgcn/error.hpp"

namespace tpcgcn::tensor {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (!a.same_shape(b)) {
    throw DimensionError(std::string(what) + ": shape mismatch " + a.shape_string() +
                         " vs " + b.shape_string());
  }
}

}  // namespace

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("matmul: cannot multiply " + a.shape_string() + " by " +
                         b.shape_string());
  }
  Matrix c(a.rows(), b.cols());
  const std::size_t n = b.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* out = c.data().data() + i * n;
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      const double* brow = b.data().data() + k * n;
      for (std::size_t j = 0; j < n; ++j) out[j] += aik * brow[j];
    }
  }
  return c;
}

Matrix matmul_backward_lhs(const Matrix& grad_out, const Matrix& b) {
  if (grad_out.cols() != b.cols()) {
    throw DimensionError("matmul_backward_lhs: gradient " + grad_out.shape_string() +
                         " incompatible with rhs " + b.shape_string());
  }
  // dA[i,k] = sum_j dC[i,j] * B[k,j]
  Matrix da(grad_out.rows(), b.rows());
  for (std::size_t i = 0; i < grad_out.rows(); ++i) {
    const auto g = grad_out.row(i);
    for (std::size_t k = 0; k < b.rows(); ++k) {
      const auto brow = b.row(k);
      double s = 0.0;
      for (std::size_t j = 0; j < g.size(); ++j) s += g[j] * brow[j];
      da(i, k) = s;
    }
  }
  return da;
}

Matrix matmul_backward_rhs(const Matrix& a, const Matrix& grad_out) {
  if (a.rows() != grad_out.rows()) {
    throw DimensionError("matmul_backward_rhs: lhs " + a.shape_string() +
                         " incompatible with gradient " + grad_out.shape_string());
  }
  // dB[k,j] = sum_i A[i,k] * dC[i,j]
  Matrix db(a.cols(), grad_out.cols());
  const std::size_t n = grad_out.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* g = grad_out.data().data() + i * n;
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      double* out = db.data().data() + k * n;
      for (std::size_t j = 0; j < n; ++j) out[j] += aik * g[j];
    }
  }
  return db;
}

Matrix spmm(const SparseMatrix& s, const Matrix& d) {
  if (s.cols() != d.rows()) {
    throw DimensionError("spmm: cannot multiply sparse " +
                         shape_string(s.rows(), s.cols()) + " by " + d.shape_string());
  }
  Matrix c(s.rows(), d.cols());
  const std::size_t n = d.cols();
  const auto& offsets = s.row_offsets();
  const auto& cols = s.col_indices();
  const auto& vals = s.values();
  for (std::size_t i = 0; i < s.rows(); ++i) {
    double* out = c.data().data() + i * n;
    for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k) {
      const double v = vals[k];
      if (v == 0.0) continue;
      const double* drow = d.data().data() + cols[k] * n;
      for (std::size_t j = 0; j < n; ++j) out[j] += v * drow[j];
    }
  }
  return c;
}

Matrix spmm_transposed(const SparseMatrix& s, const Matrix& grad_out) {
  if (s.rows() != grad_out.rows()) {
    throw DimensionError("spmm_transposed: sparse " + shape_string(s.rows(), s.cols()) +
                         " incompatible with gradient " + grad_out.shape_string());
  }
  Matrix d(s.cols(), grad_out.cols());
  const std::size_t n = grad_out.cols();
  const auto& offsets = s.row_offsets();
  const auto& cols = s.col_indices();
  const auto& vals = s.values();
  for (std::size_t i = 0; i < s.rows(); ++i) {
    const double* g = grad_out.data().data() + i * n;
    for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k) {
      double* out = d.data().data() + cols[k] * n;
      const double v = vals[k];
      for (std::size_t j = 0; j < n; ++j) out[j] += v * g[j];
    }
  }
  return d;
}

Matrix add_row_bias(const Matrix& x, const Matrix& bias) {
  if (bias.rows() != 1 || bias.cols() != x.cols()) {
    throw DimensionError("add_row_bias: bias " + bias.shape_string() +
                         " cannot broadcast over " + x.shape_string());
  }
  Matrix y = x;
  for (std::size_t i = 0; i < y.rows(); ++i) {
    auto r = y.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) r[j] += bias(0, j);
  }
  return y;
}

Matrix bias_backward(const Matrix& grad_out) {
  Matrix g(1, grad_out.cols());
  for (std::size_t i = 0; i < grad_out.rows(); ++i) {
    const auto r = grad_out.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) g(0, j) += r[j];
  }
  return g;
}

Matrix relu(const Matrix& x) {
  Matrix y = x;
  for (double& v : y.data()) v = v > 0.0 ? v : 0.0;
  return y;
}

Matrix relu_backward(const Matrix& x, const Matrix& grad_out) {
  require_same_shape(x, grad_out, "relu_backward");
  Matrix g = grad_out;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (!(x.data()[i] > 0.0)) g.data()[i] = 0.0;
  return g;
}

Matrix tanh_elem(const Matrix& x) {
  Matrix y = x;
  for (double& v : y.data()) v = std::tanh(v);
  return y;
}

Matrix tanh_backward(const Matrix& y, const Matrix& grad_out) {
  require_same_shape(y, grad_out, "tanh_backward");
  Matrix g = grad_out;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double t = y.data()[i];
    g.data()[i] *= 1.0 - t * t;
  }
  return g;
}

Matrix softmax_rows(const Matrix& logits) {
  Matrix p = logits;
  for (std::size_t i = 0; i < p.rows(); ++i) {
    auto r = p.row(i);
    if (r.empty()) continue;
    const double mx = *std::max_element(r.begin(), r.end());
    double z = 0.0;
    for (double& v : r) {
      v = std::exp(v - mx);
      z += v;
    }
    for (double& v : r) v /= z;
  }
  return p;
}

namespace {

void check_labels(const Matrix& logits, std::span<const int> labels, const char* what) {
  if (logits.rows() == 0) throw DimensionError(std::string(what) + ": empty batch");
  if (labels.size() != logits.rows()) {
    throw DimensionError(std::string(what) + ": " + std::to_string(labels.size()) +
                         " labels for " + std::to_string(logits.rows()) + " rows");
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= logits.cols()) {
      throw DimensionError(std::string(what) + ": label " + std::to_string(labels[i]) +
                           " at row " + std::to_string(i) + " outside [0," +
                           std::to_string(logits.cols()) + ")");
    }
  }
}

}  // namespace

CrossEntropyResult softmax_cross_entropy(const Matrix& logits,
                                         std::span<const int> labels) {
  check_labels(logits, labels, "softmax_cross_entropy");
  CrossEntropyResult out;
  out.probs = Matrix(logits.rows(), logits.cols());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    const auto r = logits.row(i);
    const double mx = *std::max_element(r.begin(), r.end());
    double z = 0.0;
    for (double v : r) z += std::exp(v - mx);
    const double log_z = std::log(z);
    auto p = out.probs.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) p[j] = std::exp(r[j] - mx) / z;
    // log p_label computed in log space so confident rows never hit log(0).
    total -= (r[static_cast<std::size_t>(labels[i])] - mx) - log_z;
  }
  out.loss = total / static_cast<double>(logits.rows());
  return out;
}

Matrix softmax_cross_entropy_backward(const Matrix& probs, std::span<const int> labels) {
  check_labels(probs, labels, "softmax_cross_entropy_backward");
  Matrix g = probs;
  const double inv_n = 1.0 / static_cast<double>(probs.rows());
  for (std::size_t i = 0; i < g.rows(); ++i) {
    g(i, static_cast<std::size_t>(labels[i])) -= 1.0;
    for (double& v : g.row(i)) v *= inv_n;
  }
  return g;
}

DropoutResult dropout(const Matrix& x, double rate, SeededRng& rng, bool training) {
  if (!(rate >= 0.0) || rate >= 1.0) {
    throw ValidationError("dropout rate must lie in [0,1), got " + std::to_string(rate));
  }
  if (!training || rate == 0.0) return {x, Matrix(x.rows(), x.cols(), 1.0)};
  const double keep_scale = 1.0 / (1.0 - rate);
  DropoutResult r{x, Matrix(x.rows(), x.cols())};
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double m = rng.uniform() < rate ? 0.0 : keep_scale;
    r.mask.data()[i] = m;
    r.output.data()[i] = x.data()[i] * m;
  }
  return r;
}

Matrix dropout_backward(const Matrix& mask, const Matrix& grad_out) {
  return hadamard(mask, grad_out);
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "hadamard");
  Matrix c = a;
  for (std::size_t i = 0; i < c.size(); ++i) c.data()[i] *= b.data()[i];
  return c;
}

Matrix gather_rows(const Matrix& x, std::span<const std::size_t> indices) {
  Matrix out(indices.size(), x.cols());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= x.rows()) {
      throw DimensionError("gather_rows: row " + std::to_string(indices[i]) +
                           " out of range for " + x.shape_string());
    }
    std::copy_n(x.row(indices[i]).begin(), x.cols(), out.row(i).begin());
  }
  return out;
}

void scatter_add_rows(Matrix& target, std::span<const std::size_t> indices,
                      const Matrix& rows) {
  if (rows.rows() != indices.size() || rows.cols() != target.cols()) {
    throw DimensionError("scatter_add_rows: " + rows.shape_string() + " into " +
                         target.shape_string());
  }
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= target.rows()) {
      throw DimensionError("scatter_add_rows: row " + std::to_string(indices[i]) +
                           " out of range for " + target.shape_string());
    }
    auto dst = target.row(indices[i]);
    const auto src = rows.row(i);
    for (std::size_t j = 0; j < src.size(); ++j) dst[j] += src[j];
  }
}

std::vector<std::size_t> argmax_rows(const Matrix& x) {
  std::vector<std::size_t> out(x.rows(), 0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto r = x.row(i);
    out[i] = static_cast<std::size_t>(std::max_element(r.begin(), r.end()) - r.begin());
  }
  return out;
}

}  // namespace tpcgcn::tensor

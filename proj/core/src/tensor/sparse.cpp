#include "tpcgcn/tensor/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tpcgcn/error.hpp"

namespace tpcgcn::tensor {

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols,
                           std::vector<Triplet> entries)
    : rows_(rows), cols_(cols) {
  for (const auto& t : entries) {
    if (t.row >= rows || t.col >= cols) {
      throw DimensionError("sparse entry (" + std::to_string(t.row) + "," +
                           std::to_string(t.col) + ") out of bounds for " +
                           shape_string(rows, cols));
    }
    if (!std::isfinite(t.value)) {
      throw NumericError("sparse entry (" + std::to_string(t.row) + "," +
                         std::to_string(t.col) + ") is not finite");
    }
  }
  std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (entries[i].row == entries[i - 1].row && entries[i].col == entries[i - 1].col) {
      throw DimensionError("duplicate sparse entry (" + std::to_string(entries[i].row) +
                           "," + std::to_string(entries[i].col) + ")");
    }
  }
  row_offsets_.assign(rows + 1, 0);
  col_indices_.reserve(entries.size());
  values_.reserve(entries.size());
  for (const auto& t : entries) {
    ++row_offsets_[t.row + 1];
    col_indices_.push_back(t.col);
    values_.push_back(t.value);
  }
  for (std::size_t r = 0; r < rows; ++r) row_offsets_[r + 1] += row_offsets_[r];
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  std::vector<Triplet> entries;
  entries.reserve(n);
  for (std::size_t i = 0; i < n; ++i) entries.push_back({i, i, 1.0});
  return SparseMatrix(n, n, std::move(entries));
}

std::vector<Triplet> SparseMatrix::triplets() const {
  std::vector<Triplet> out;
  out.reserve(nnz());
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k)
      out.push_back({r, col_indices_[k], values_[k]});
  return out;
}

Matrix SparseMatrix::densify() const {
  Matrix d(rows_, cols_);
  for (const auto& t : triplets()) d(t.row, t.col) = t.value;
  return d;
}

}  // namespace tpcgcn::tensor

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "textgat/numcore/dense.hpp"

namespace textgat {

struct Triplet {
  std::size_t row = 0;
  std::size_t col = 0;
  double value = 0.0;
};

// Compressed row storage. Column indices are strictly increasing within each
// row and no stored value is exactly zero.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), offsets_(rows + 1, 0) {}

  // Duplicate (row, col) entries are summed; entries that end up zero are dropped.
  static SparseMatrix from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> triplets);
  static SparseMatrix identity(std::size_t n);
  static SparseMatrix from_dense(const DenseMatrix& dense);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return cols_idx_.size(); }

  std::span<const std::size_t> offsets() const { return offsets_; }
  std::span<const std::size_t> col_indices() const { return cols_idx_; }
  std::span<const double> values() const { return values_; }

  std::span<const std::size_t> row_cols(std::size_t r) const {
    return {cols_idx_.data() + offsets_[r], offsets_[r + 1] - offsets_[r]};
  }
  std::span<const double> row_values(std::size_t r) const {
    return {values_.data() + offsets_[r], offsets_[r + 1] - offsets_[r]};
  }

  // Stored value at (r, c), or 0 when absent.
  double at(std::size_t r, std::size_t c) const;
  // Index into values() of entry (r, c), or nnz() when absent.
  std::size_t find(std::size_t r, std::size_t c) const;

  bool is_symmetric() const;
  SparseMatrix transpose() const;
  DenseMatrix to_dense() const;

  // Same pattern, values replaced; values.size() must equal nnz().
  SparseMatrix with_values(std::vector<double> values) const;

  friend bool operator==(const SparseMatrix&, const SparseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<std::size_t> cols_idx_;
  std::vector<double> values_;
};

// A * B with a fixed accumulation order: for each output row, stored entries of
// the sparse row are visited left to right.
DenseMatrix spmm(const SparseMatrix& a, const DenseMatrix& b);
// A^T * B without materializing the transpose. Rows of A are visited in
// ascending order, entries left to right.
DenseMatrix spmm_tn(const SparseMatrix& a, const DenseMatrix& b);

}  // namespace textgat

#include "textgat/numcore/sparse.hpp"

#include <algorithm>
#include <string>

#include "textgat/error.hpp"
#include "textgat/numcore/kernels.hpp"

namespace textgat {

SparseMatrix SparseMatrix::from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> triplets) {
  for (const auto& t : triplets)
    if (t.row >= rows || t.col >= cols) throw Error("SparseMatrix: triplet out of range");
  std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });

  SparseMatrix m(rows, cols);
  std::size_t i = 0;
  while (i < triplets.size()) {
    std::size_t j = i;
    double v = 0.0;
    while (j < triplets.size() && triplets[j].row == triplets[i].row && triplets[j].col == triplets[i].col) {
      v += triplets[j].value;
      ++j;
    }
    if (v != 0.0) {
      m.cols_idx_.push_back(triplets[i].col);
      m.values_.push_back(v);
      ++m.offsets_[triplets[i].row + 1];
    }
    i = j;
  }
  for (std::size_t r = 0; r < rows; ++r) m.offsets_[r + 1] += m.offsets_[r];
  return m;
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  SparseMatrix m(n, n);
  m.cols_idx_.resize(n);
  m.values_.assign(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    m.cols_idx_[i] = i;
    m.offsets_[i + 1] = i + 1;
  }
  return m;
}

SparseMatrix SparseMatrix::from_dense(const DenseMatrix& dense) {
  SparseMatrix m(dense.rows(), dense.cols());
  for (std::size_t r = 0; r < dense.rows(); ++r) {
    for (std::size_t c = 0; c < dense.cols(); ++c) {
      if (dense(r, c) != 0.0) {
        m.cols_idx_.push_back(c);
        m.values_.push_back(dense(r, c));
      }
    }
    m.offsets_[r + 1] = m.cols_idx_.size();
  }
  return m;
}

std::size_t SparseMatrix::find(std::size_t r, std::size_t c) const {
  auto cols = row_cols(r);
  auto it = std::lower_bound(cols.begin(), cols.end(), c);
  if (it == cols.end() || *it != c) return nnz();
  return offsets_[r] + static_cast<std::size_t>(it - cols.begin());
}

double SparseMatrix::at(std::size_t r, std::size_t c) const {
  std::size_t k = find(r, c);
  return k == nnz() ? 0.0 : values_[k];
}

bool SparseMatrix::is_symmetric() const {
  if (rows_ != cols_) return false;
  for (std::size_t r = 0; r < rows_; ++r) {
    auto cols = row_cols(r);
    auto vals = row_values(r);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      std::size_t mirror = find(cols[k], r);
      if (mirror == nnz() || values_[mirror] != vals[k]) return false;
    }
  }
  return true;
}

SparseMatrix SparseMatrix::transpose() const {
  SparseMatrix t(cols_, rows_);
  t.cols_idx_.resize(nnz());
  t.values_.resize(nnz());
  for (std::size_t c : cols_idx_) ++t.offsets_[c + 1];
  for (std::size_t c = 0; c < cols_; ++c) t.offsets_[c + 1] += t.offsets_[c];
  std::vector<std::size_t> cursor(t.offsets_.begin(), t.offsets_.end() - 1);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t k = offsets_[r]; k < offsets_[r + 1]; ++k) {
      std::size_t dst = cursor[cols_idx_[k]]++;
      t.cols_idx_[dst] = r;
      t.values_[dst] = values_[k];
    }
  }
  return t;
}

DenseMatrix SparseMatrix::to_dense() const {
  DenseMatrix d(rows_, cols_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t k = offsets_[r]; k < offsets_[r + 1]; ++k) d(r, cols_idx_[k]) = values_[k];
  return d;
}

SparseMatrix SparseMatrix::with_values(std::vector<double> values) const {
  if (values.size() != nnz()) throw Error("SparseMatrix::with_values: size mismatch");
  SparseMatrix m = *this;
  m.values_ = std::move(values);
  return m;
}

DenseMatrix spmm(const SparseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows())
    throw Error("spmm: dimension mismatch (" + std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + ")");
  const auto& k = simd::active();
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    auto cols = a.row_cols(r);
    auto vals = a.row_values(r);
    double* out = c.row(r).data();
    for (std::size_t e = 0; e < cols.size(); ++e) k.axpy(vals[e], b.row(cols[e]).data(), out, b.cols());
  }
  return c;
}

DenseMatrix spmm_tn(const SparseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows())
    throw Error("spmm_tn: dimension mismatch (" + std::to_string(a.rows()) + " vs " + std::to_string(b.rows()) + ")");
  const auto& k = simd::active();
  DenseMatrix c(a.cols(), b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    auto cols = a.row_cols(r);
    auto vals = a.row_values(r);
    const double* src = b.row(r).data();
    for (std::size_t e = 0; e < cols.size(); ++e) k.axpy(vals[e], src, c.row(cols[e]).data(), b.cols());
  }
  return c;
}

}  // namespace textgat

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace textgat {

// Row-major matrix of doubles. Value type: copies are deep.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {values_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {values_.data() + r * cols_, cols_}; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  void fill(double v);
  bool all_finite() const;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

// C = A * B. Each output row accumulates A(i,k) * B.row(k) for k ascending.
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
// C = A^T * B, accumulated over rows of A in ascending order.
DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b);
// C = A * B^T.
DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix transpose(const DenseMatrix& a);

// y += alpha * x, elementwise; shapes must match.
void axpy(double alpha, const DenseMatrix& x, DenseMatrix& y);
double sum_of_squares(const DenseMatrix& a);
double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b);

}  // namespace textgat

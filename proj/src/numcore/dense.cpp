#include "textgat/numcore/dense.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "textgat/error.hpp"
#include "textgat/numcore/kernels.hpp"

namespace textgat {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows * cols) throw Error("DenseMatrix: value count does not match shape");
}

void DenseMatrix::fill(double v) { std::fill(values_.begin(), values_.end(), v); }

bool DenseMatrix::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

namespace {
void require(bool ok, const char* what, std::size_t a, std::size_t b) {
  if (!ok) throw Error(std::string(what) + ": dimension mismatch (" + std::to_string(a) + " vs " + std::to_string(b) + ")");
}
}  // namespace

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.cols() == b.rows(), "matmul", a.cols(), b.rows());
  const auto& k = simd::active();
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* out = c.row(i).data();
    for (std::size_t p = 0; p < a.cols(); ++p) {
      double s = a(i, p);
      if (s != 0.0) k.axpy(s, b.row(p).data(), out, b.cols());
    }
  }
  return c;
}

DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.rows() == b.rows(), "matmul_tn", a.rows(), b.rows());
  const auto& k = simd::active();
  DenseMatrix c(a.cols(), b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const double* src = b.row(r).data();
    for (std::size_t i = 0; i < a.cols(); ++i) {
      double s = a(r, i);
      if (s != 0.0) k.axpy(s, src, c.row(i).data(), b.cols());
    }
  }
  return c;
}

DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.cols() == b.cols(), "matmul_nt", a.cols(), b.cols());
  DenseMatrix c(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto ar = a.row(i);
    for (std::size_t j = 0; j < b.rows(); ++j) {
      auto br = b.row(j);
      double s = 0.0;
      for (std::size_t p = 0; p < ar.size(); ++p) s += ar[p] * br[p];
      c(i, j) = s;
    }
  }
  return c;
}

DenseMatrix transpose(const DenseMatrix& a) {
  DenseMatrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

void axpy(double alpha, const DenseMatrix& x, DenseMatrix& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) throw Error("axpy: shape mismatch");
  simd::active().axpy(alpha, x.values().data(), y.values().data(), x.size());
}

double sum_of_squares(const DenseMatrix& a) {
  double s = 0.0;
  for (double v : a.values()) s += v * v;
  return s;
}

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw Error("max_abs_diff: shape mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
  return m;
}

}  // namespace textgat

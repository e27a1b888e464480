#include "textgat/layers/features.hpp"

namespace textgat {

std::size_t feature_rows(const Features& x) {
  return std::visit([](const auto& m) { return m.rows(); }, x);
}

std::size_t feature_cols(const Features& x) {
  return std::visit([](const auto& m) { return m.cols(); }, x);
}

DenseMatrix multiply(const Features& x, const DenseMatrix& w) {
  if (const auto* s = std::get_if<SparseMatrix>(&x)) return spmm(*s, w);
  return matmul(std::get<DenseMatrix>(x), w);
}

DenseMatrix multiply_tn(const Features& x, const DenseMatrix& dz) {
  if (const auto* s = std::get_if<SparseMatrix>(&x)) return spmm_tn(*s, dz);
  return matmul_tn(std::get<DenseMatrix>(x), dz);
}

}  // namespace textgat

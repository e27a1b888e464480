#pragma once

#include <variant>

#include "textgat/numcore/dense.hpp"
#include "textgat/numcore/sparse.hpp"

namespace textgat {

// Layer input: sparse for the first layer (one-hot or externally supplied
// node features), dense for hidden activations.
using Features = std::variant<SparseMatrix, DenseMatrix>;

std::size_t feature_rows(const Features& x);
std::size_t feature_cols(const Features& x);
// x * w
DenseMatrix multiply(const Features& x, const DenseMatrix& w);
// x^T * dz
DenseMatrix multiply_tn(const Features& x, const DenseMatrix& dz);

}  // namespace textgat

#pragma once

#include <span>
#include <vector>

#include "textgat/numcore/dense.hpp"

namespace textgat {

inline double leaky_relu(double x, double alpha) { return x >= 0.0 ? x : alpha * x; }
inline double leaky_relu_grad(double x, double alpha) { return x >= 0.0 ? 1.0 : alpha; }

DenseMatrix leaky_relu(const DenseMatrix& x, double alpha);

// Exponential linear unit with unit scale: x for x > 0, exp(x) - 1 otherwise.
double elu(double x);
double elu_grad(double x);

// Max-subtracted softmax of v into out (same length, non-empty). Sum is
// accumulated left to right.
void softmax_row(std::span<const double> v, std::span<double> out);
std::vector<double> softmax_row(std::span<const double> v);
DenseMatrix softmax_rows(const DenseMatrix& x);

}  // namespace textgat

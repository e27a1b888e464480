#include "textgat/numcore/activations.hpp"

#include <algorithm>
#include <cmath>

#include "textgat/error.hpp"

namespace textgat {

DenseMatrix leaky_relu(const DenseMatrix& x, double alpha) {
  DenseMatrix y = x;
  for (double& v : y.values()) v = leaky_relu(v, alpha);
  return y;
}

double elu(double x) { return x > 0.0 ? x : std::expm1(x); }
double elu_grad(double x) { return x > 0.0 ? 1.0 : std::exp(x); }

void softmax_row(std::span<const double> v, std::span<double> out) {
  if (v.empty()) throw Error("softmax_row: empty input");
  if (out.size() != v.size()) throw Error("softmax_row: output size mismatch");
  double mx = *std::max_element(v.begin(), v.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = std::exp(v[i] - mx);
    sum += out[i];
  }
  for (double& o : out) o /= sum;
}

std::vector<double> softmax_row(std::span<const double> v) {
  std::vector<double> out(v.size());
  softmax_row(v, out);
  return out;
}

DenseMatrix softmax_rows(const DenseMatrix& x) {
  DenseMatrix y(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) softmax_row(x.row(r), y.row(r));
  return y;
}

}  // namespace textgat

#include <cmath>

#include "textgat/numcore/kernels.hpp"

namespace textgat::simd {
namespace {

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    double t = a * x[i];
    y[i] = y[i] + t;
  }
}

void scale_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = a * x[i];
}

void mul_scalar(const double* x, const double* m, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] * m[i];
}

void adam_scalar(const AdamCoefficients& c, const double* g, double* m, double* v, double* p, std::size_t n) {
  const double one_b1 = 1.0 - c.beta1;
  const double one_b2 = 1.0 - c.beta2;
  for (std::size_t i = 0; i < n; ++i) {
    double mi = c.beta1 * m[i];
    mi = mi + one_b1 * g[i];
    double gg = g[i] * g[i];
    double vi = c.beta2 * v[i];
    vi = vi + one_b2 * gg;
    m[i] = mi;
    v[i] = vi;
    double mhat = mi / c.bias1;
    double vhat = vi / c.bias2;
    double denom = std::sqrt(vhat) + c.eps;
    double step = c.lr * mhat;
    p[i] = p[i] - step / denom;
  }
}

}  // namespace

const Kernels& scalar_kernels() {
  static const Kernels k{Isa::scalar, axpy_scalar, scale_scalar, mul_scalar, adam_scalar};
  return k;
}

}  // namespace textgat::simd

#include <arm_neon.h>

#include "textgat/numcore/kernels.hpp"

namespace textgat::simd {
namespace {

void axpy_neon(double a, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t t = vmulq_f64(va, vld1q_f64(x + i));
    vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), t));
  }
  for (; i < n; ++i) {
    double t = a * x[i];
    y[i] = y[i] + t;
  }
}

void scale_neon(double a, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vmulq_f64(va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] = a * x[i];
}

void mul_neon(const double* x, const double* m, double* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vmulq_f64(vld1q_f64(x + i), vld1q_f64(m + i)));
  for (; i < n; ++i) y[i] = x[i] * m[i];
}

void adam_neon(const AdamCoefficients& c, const double* g, double* m, double* v, double* p, std::size_t n) {
  const float64x2_t b1 = vdupq_n_f64(c.beta1);
  const float64x2_t b2 = vdupq_n_f64(c.beta2);
  const float64x2_t ob1 = vdupq_n_f64(1.0 - c.beta1);
  const float64x2_t ob2 = vdupq_n_f64(1.0 - c.beta2);
  const float64x2_t bc1 = vdupq_n_f64(c.bias1);
  const float64x2_t bc2 = vdupq_n_f64(c.bias2);
  const float64x2_t lr = vdupq_n_f64(c.lr);
  const float64x2_t eps = vdupq_n_f64(c.eps);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t gi = vld1q_f64(g + i);
    float64x2_t mi = vaddq_f64(vmulq_f64(b1, vld1q_f64(m + i)), vmulq_f64(ob1, gi));
    float64x2_t vi = vaddq_f64(vmulq_f64(b2, vld1q_f64(v + i)), vmulq_f64(ob2, vmulq_f64(gi, gi)));
    vst1q_f64(m + i, mi);
    vst1q_f64(v + i, vi);
    float64x2_t denom = vaddq_f64(vsqrtq_f64(vdivq_f64(vi, bc2)), eps);
    float64x2_t step = vmulq_f64(lr, vdivq_f64(mi, bc1));
    vst1q_f64(p + i, vsubq_f64(vld1q_f64(p + i), vdivq_f64(step, denom)));
  }
  if (i < n) scalar_kernels().adam(c, g + i, m + i, v + i, p + i, n - i);
}

}  // namespace

const Kernels& neon_kernels() {
  static const Kernels k{Isa::neon, axpy_neon, scale_neon, mul_neon, adam_neon};
  return k;
}

}  // namespace textgat::simd

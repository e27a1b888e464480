#include <immintrin.h>

#include <cmath>

#include "textgat/numcore/kernels.hpp"

namespace textgat::simd {
namespace {

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d t = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), t));
  }
  for (; i < n; ++i) {
    double t = a * x[i];
    y[i] = y[i] + t;
  }
}

void scale_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(y + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) y[i] = a * x[i];
}

void mul_avx2(const double* x, const double* m, double* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(m + i)));
  for (; i < n; ++i) y[i] = x[i] * m[i];
}

void adam_avx2(const AdamCoefficients& c, const double* g, double* m, double* v, double* p, std::size_t n) {
  const __m256d b1 = _mm256_set1_pd(c.beta1);
  const __m256d b2 = _mm256_set1_pd(c.beta2);
  const __m256d ob1 = _mm256_set1_pd(1.0 - c.beta1);
  const __m256d ob2 = _mm256_set1_pd(1.0 - c.beta2);
  const __m256d bc1 = _mm256_set1_pd(c.bias1);
  const __m256d bc2 = _mm256_set1_pd(c.bias2);
  const __m256d lr = _mm256_set1_pd(c.lr);
  const __m256d eps = _mm256_set1_pd(c.eps);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d gi = _mm256_loadu_pd(g + i);
    __m256d mi = _mm256_add_pd(_mm256_mul_pd(b1, _mm256_loadu_pd(m + i)), _mm256_mul_pd(ob1, gi));
    __m256d gg = _mm256_mul_pd(gi, gi);
    __m256d vi = _mm256_add_pd(_mm256_mul_pd(b2, _mm256_loadu_pd(v + i)), _mm256_mul_pd(ob2, gg));
    _mm256_storeu_pd(m + i, mi);
    _mm256_storeu_pd(v + i, vi);
    __m256d mhat = _mm256_div_pd(mi, bc1);
    __m256d vhat = _mm256_div_pd(vi, bc2);
    __m256d denom = _mm256_add_pd(_mm256_sqrt_pd(vhat), eps);
    __m256d step = _mm256_mul_pd(lr, mhat);
    _mm256_storeu_pd(p + i, _mm256_sub_pd(_mm256_loadu_pd(p + i), _mm256_div_pd(step, denom)));
  }
  if (i < n) {
    AdamCoefficients tail = c;
    scalar_kernels().adam(tail, g + i, m + i, v + i, p + i, n - i);
  }
}

}  // namespace

const Kernels& avx2_kernels() {
  static const Kernels k{Isa::avx2, axpy_avx2, scale_avx2, mul_avx2, adam_avx2};
  return k;
}

}  // namespace textgat::simd

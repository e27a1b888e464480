#pragma once

#include <cstddef>
#include <string_view>

// Elementwise inner-loop kernels. Each ISA variant performs exactly the same
// IEEE operations per element as the scalar reference (no fused multiply-add,
// no cross-element reassociation), so every variant is bit-identical to the
// scalar one. Vectorization runs across independent elements only.
namespace textgat::simd {

enum class Isa { scalar, avx2, neon };

struct AdamCoefficients {
  double lr;
  double beta1;
  double beta2;
  double eps;
  double bias1;  // 1 - beta1^t
  double bias2;  // 1 - beta2^t
};

struct Kernels {
  Isa isa;
  // y[i] += a * x[i]
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // y[i] = a * x[i]
  void (*scale)(double a, const double* x, double* y, std::size_t n);
  // y[i] = x[i] * m[i]
  void (*mul)(const double* x, const double* m, double* y, std::size_t n);
  // m = b1*m + (1-b1)*g ; v = b2*v + (1-b2)*g*g ; p -= lr * (m/bias1) / (sqrt(v/bias2) + eps)
  void (*adam)(const AdamCoefficients& c, const double* g, double* m, double* v, double* p, std::size_t n);
};

const Kernels& scalar_kernels();
// Kernels for a specific ISA; nullptr when not compiled in or not supported by
// the running CPU.
const Kernels* kernels_for(Isa isa);

// Best available variant, chosen once. TEXTGAT_SIMD=scalar|avx2|neon in the
// environment forces a choice (falls back to scalar when unavailable).
const Kernels& active();
// Override the active variant (tests and benchmarks). Returns false when the
// ISA is unavailable.
bool set_active(Isa isa);

std::string_view isa_name(Isa isa);

}  // namespace textgat::simd

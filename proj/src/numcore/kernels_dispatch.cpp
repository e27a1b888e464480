#include <atomic>
#include <cstdlib>
#include <string>

#include "textgat/numcore/kernels.hpp"

namespace textgat::simd {

#if defined(TEXTGAT_HAVE_AVX2)
const Kernels& avx2_kernels();
#endif
#if defined(TEXTGAT_HAVE_NEON)
const Kernels& neon_kernels();
#endif

namespace {

bool cpu_has_avx2() {
#if defined(TEXTGAT_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const Kernels* pick_default() {
  if (const char* env = std::getenv("TEXTGAT_SIMD")) {
    std::string want(env);
    if (want == "scalar") return &scalar_kernels();
    if (want == "avx2") {
      if (auto* k = kernels_for(Isa::avx2)) return k;
      return &scalar_kernels();
    }
    if (want == "neon") {
      if (auto* k = kernels_for(Isa::neon)) return k;
      return &scalar_kernels();
    }
  }
  if (auto* k = kernels_for(Isa::avx2)) return k;
  if (auto* k = kernels_for(Isa::neon)) return k;
  return &scalar_kernels();
}

std::atomic<const Kernels*>& slot() {
  static std::atomic<const Kernels*> s{pick_default()};
  return s;
}

}  // namespace

const Kernels* kernels_for(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return &scalar_kernels();
    case Isa::avx2:
#if defined(TEXTGAT_HAVE_AVX2)
      if (cpu_has_avx2()) return &avx2_kernels();
#endif
      return nullptr;
    case Isa::neon:
#if defined(TEXTGAT_HAVE_NEON)
      return &neon_kernels();
#else
      return nullptr;
#endif
  }
  return nullptr;
}

const Kernels& active() { return *slot().load(std::memory_order_relaxed); }

bool set_active(Isa isa) {
  const Kernels* k = kernels_for(isa);
  if (!k) return false;
  slot().store(k, std::memory_order_relaxed);
  return true;
}

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

}  // namespace textgat::simd

#include "textgat/layers/dropout.hpp"

#include "textgat/error.hpp"
#include "textgat/numcore/kernels.hpp"

namespace textgat {

std::vector<double> dropout_mask(std::size_t n, double rate, Rng& rng, Mode mode) {
  if (rate < 0.0 || rate >= 1.0) throw Error("dropout rate must be in [0, 1)");
  if (mode == Mode::eval || rate == 0.0) return {};
  const double keep_scale = 1.0 / (1.0 - rate);
  std::vector<double> mask(n);
  for (double& m : mask) m = rng.uniform() < rate ? 0.0 : keep_scale;
  return mask;
}

void apply_mask(std::vector<double>& values, const std::vector<double>& mask) {
  if (mask.empty()) return;
  if (mask.size() != values.size()) throw Error("dropout mask size mismatch");
  simd::active().mul(values.data(), mask.data(), values.data(), values.size());
}

void apply_mask(DenseMatrix& values, const std::vector<double>& mask) {
  if (mask.empty()) return;
  if (mask.size() != values.size()) throw Error("dropout mask size mismatch");
  simd::active().mul(values.values().data(), mask.data(), values.values().data(), values.size());
}

DenseMatrix dropout(const DenseMatrix& h, double rate, Rng& rng, Mode mode) {
  DenseMatrix out = h;
  apply_mask(out, dropout_mask(h.size(), rate, rng, mode));
  return out;
}

}  // namespace textgat

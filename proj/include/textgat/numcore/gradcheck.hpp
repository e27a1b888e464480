#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace textgat {

struct GradCheckOptions {
  double epsilon = 1e-5;
  // Number of coordinates to probe; 0 probes every coordinate.
  std::size_t samples = 0;
  std::uint64_t seed = 0;
};

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  std::size_t checked = 0;
};

// Compares analytic gradients against central differences
//   g_fd = (f(w + eps e_i) - f(w - eps e_i)) / (2 eps)
// with error |g_fd - g_an| / max(1, |g_fd|, |g_an|). The loss callback reads
// the current contents of `params`, which is perturbed in place and restored.
// Throws Error when the loss evaluates to a non-finite value.
GradCheckResult finite_diff_check(const std::function<double()>& loss, std::span<double> params,
                                  std::span<const double> analytic, const GradCheckOptions& options = {});

}  // namespace textgat

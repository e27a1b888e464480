#include "textgat/numcore/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "textgat/error.hpp"
#include "textgat/numcore/rng.hpp"

namespace textgat {

namespace {
double checked_loss(const std::function<double()>& loss, std::size_t coord) {
  double v = loss();
  if (!std::isfinite(v)) throw Error("finite_diff_check: non-finite loss at coordinate " + std::to_string(coord));
  return v;
}
}  // namespace

GradCheckResult finite_diff_check(const std::function<double()>& loss, std::span<double> params,
                                  std::span<const double> analytic, const GradCheckOptions& options) {
  if (params.size() != analytic.size()) throw Error("finite_diff_check: gradient size mismatch");
  checked_loss(loss, 0);

  std::vector<std::size_t> coords(params.size());
  std::iota(coords.begin(), coords.end(), std::size_t{0});
  if (options.samples > 0 && options.samples < coords.size()) {
    Rng rng(options.seed);
    rng.shuffle(coords);
    coords.resize(options.samples);
    std::sort(coords.begin(), coords.end());
  }

  GradCheckResult result;
  for (std::size_t i : coords) {
    const double saved = params[i];
    params[i] = saved + options.epsilon;
    double plus = checked_loss(loss, i);
    params[i] = saved - options.epsilon;
    double minus = checked_loss(loss, i);
    params[i] = saved;

    double fd = (plus - minus) / (2.0 * options.epsilon);
    double an = analytic[i];
    double err = std::abs(fd - an) / std::max({1.0, std::abs(fd), std::abs(an)});
    if (err > result.max_rel_error || result.checked == 0) {
      result.max_rel_error = std::max(result.max_rel_error, err);
      if (err >= result.max_rel_error) result.worst_index = i;
    }
    ++result.checked;
  }
  return result;
}

}  // namespace textgat

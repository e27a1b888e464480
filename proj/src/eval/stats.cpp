#include <boost/math/distributions/students_t.hpp>
#include <cmath>

#include "textgat/error.hpp"
#include "textgat/eval.hpp"

namespace textgat {

Summary summarize(std::span<const double> values) {
  if (values.empty()) throw Error("summarize: no values");
  Summary s;
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

TTest welch_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw Error("t-test: each sample needs at least 2 values");
  Summary sa = summarize(a), sb = summarize(b);
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  const double va = sa.std * sa.std / na, vb = sb.std * sb.std / nb;
  TTest t;
  const double se = std::sqrt(va + vb);
  if (se == 0.0) {
    t.t = sa.mean == sb.mean ? 0.0 : std::copysign(INFINITY, sa.mean - sb.mean);
    t.df = na + nb - 2.0;
    t.p_value = sa.mean == sb.mean ? 1.0 : 0.0;
    return t;
  }
  t.t = (sa.mean - sb.mean) / se;
  t.df = (va + vb) * (va + vb) / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
  boost::math::students_t dist(t.df);
  t.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t.t)));
  return t;
}

}  // namespace textgat

#include <cmath>

#include "textgat/error.hpp"
#include "textgat/numcore/kernels.hpp"
#include "textgat/train.hpp"

namespace textgat {

Adam::Adam(const ModelParams& shape, double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
  for (const DenseMatrix* t : shape.tensors()) {
    m_.emplace_back(t->size(), 0.0);
    v_.emplace_back(t->size(), 0.0);
  }
}

void Adam::step(ModelParams& params, const ModelParams& grads) {
  auto p = params.tensors();
  auto g = grads.tensors();
  if (p.size() != m_.size() || g.size() != m_.size()) throw Error("Adam: parameter layout changed");
  ++t_;
  const double t = static_cast<double>(t_);
  simd::AdamCoefficients c{lr_, beta1_, beta2_, eps_, 1.0 - std::pow(beta1_, t), 1.0 - std::pow(beta2_, t)};
  const auto& k = simd::active();
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i]->size() != m_[i].size() || g[i]->size() != m_[i].size()) throw Error("Adam: tensor size changed");
    k.adam(c, g[i]->values().data(), m_[i].data(), v_[i].data(), p[i]->values().data(), m_[i].size());
  }
}

}  // namespace textgat

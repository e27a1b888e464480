#include "textgat/layers/gcn.hpp"

#include <string>

#include "textgat/error.hpp"
#include "textgat/numcore/activations.hpp"

namespace textgat {

namespace {
Features drop(const Features& input, double rate, Mode mode, Rng* rng, std::vector<double>& mask) {
  mask.clear();
  if (mode == Mode::eval || rate == 0.0) return input;
  if (!rng) throw Error("dropout in train mode needs a random generator");
  if (const auto* s = std::get_if<SparseMatrix>(&input)) {
    mask = dropout_mask(s->nnz(), rate, *rng, mode);
    std::vector<double> v(s->values().begin(), s->values().end());
    apply_mask(v, mask);
    return s->with_values(std::move(v));
  }
  DenseMatrix d = std::get<DenseMatrix>(input);
  mask = dropout_mask(d.size(), rate, *rng, mode);
  apply_mask(d, mask);
  return d;
}
}  // namespace

DenseMatrix gcn_layer_forward(const Features& input, const SparseMatrix& a_hat, const GcnLayerParams& params,
                              double dropout_rate, Mode mode, Rng* rng, GcnLayerCache* cache) {
  const std::size_t n = feature_rows(input);
  if (a_hat.rows() != n || a_hat.cols() != n) throw Error("GCN layer: normalized adjacency does not match node count");
  if (feature_cols(input) != params.weight.rows())
    throw Error("GCN layer: input width " + std::to_string(feature_cols(input)) + " does not match weight rows " +
                std::to_string(params.weight.rows()));
  std::vector<double> mask;
  Features x = drop(input, dropout_rate, mode, rng, mask);
  DenseMatrix pre = spmm(a_hat, multiply(x, params.weight));

  DenseMatrix out;
  switch (params.activation) {
    case GcnActivation::relu:
      out = pre;
      for (double& v : out.values()) v = v > 0.0 ? v : 0.0;
      break;
    case GcnActivation::softmax:
      out = softmax_rows(pre);
      break;
    case GcnActivation::none:
      out = pre;
      break;
  }
  if (cache) {
    cache->input = std::move(x);
    cache->input_mask = std::move(mask);
    cache->preactivation = std::move(pre);
    cache->valid = true;
  }
  return out;
}

GcnLayerGrads gcn_layer_backward(const DenseMatrix& upstream, const SparseMatrix& a_hat, const GcnLayerParams& params,
                                 const GcnLayerCache& cache) {
  if (!cache.valid) throw Error("GCN backward: missing forward cache");
  if (upstream.rows() != cache.preactivation.rows() || upstream.cols() != cache.preactivation.cols())
    throw Error("GCN backward: upstream shape mismatch");
  DenseMatrix d_pre = upstream;
  if (params.activation == GcnActivation::relu) {
    auto pre = cache.preactivation.values();
    auto d = d_pre.values();
    for (std::size_t i = 0; i < d.size(); ++i)
      if (!(pre[i] > 0.0)) d[i] = 0.0;
  }
  DenseMatrix d_xw = spmm_tn(a_hat, d_pre);
  GcnLayerGrads g;
  g.weight = multiply_tn(cache.input, d_xw);
  if (std::holds_alternative<DenseMatrix>(cache.input)) {
    g.input = matmul_nt(d_xw, params.weight);
    apply_mask(g.input, cache.input_mask);
  }
  return g;
}

DenseMatrix gcn_forward(const Features& x, const SparseMatrix& a_hat, const DenseMatrix& w0, const DenseMatrix& w1) {
  GcnLayerParams l0{w0, GcnActivation::relu};
  GcnLayerParams l1{w1, GcnActivation::softmax};
  DenseMatrix h = gcn_layer_forward(x, a_hat, l0, 0.0, Mode::eval, nullptr);
  return gcn_layer_forward(Features{std::move(h)}, a_hat, l1, 0.0, Mode::eval, nullptr);
}

}  // namespace textgat

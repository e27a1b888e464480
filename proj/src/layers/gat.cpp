#include "textgat/layers/gat.hpp"

#include <cmath>
#include <string>

#include "textgat/error.hpp"
#include "textgat/numcore/activations.hpp"
#include "textgat/numcore/kernels.hpp"

namespace textgat {

GatLayerParams GatLayerParams::zeros_like() const {
  GatLayerParams z = *this;
  for (auto& w : z.weights) w.fill(0.0);
  for (auto& a : z.kernels) a.fill(0.0);
  return z;
}

void GatLayerParams::validate() const {
  if (weights.empty()) throw Error("GAT layer needs at least one head");
  if (kernels.size() != weights.size()) throw Error("GAT layer: one attention kernel per head required");
  for (std::size_t k = 0; k < heads(); ++k) {
    if (weights[k].rows() != in_dim() || weights[k].cols() != head_dim())
      throw Error("GAT layer: head " + std::to_string(k) + " weight shape differs");
    if (kernels[k].rows() != 1 || kernels[k].cols() != 2 * head_dim())
      throw Error("GAT layer: head " + std::to_string(k) + " kernel must be 1 x 2F'");
  }
}

namespace {

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

// Projections of every node onto the source and destination halves of the kernel.
void project(const DenseMatrix& z, const DenseMatrix& kernel, std::vector<double>& src, std::vector<double>& dst) {
  const std::size_t f = z.cols();
  const double* a = kernel.values().data();
  src.resize(z.rows());
  dst.resize(z.rows());
  for (std::size_t i = 0; i < z.rows(); ++i) {
    src[i] = dot(a, z.row(i).data(), f);
    dst[i] = dot(a + f, z.row(i).data(), f);
  }
}

Features drop_input(const Features& input, double rate, Mode mode, Rng* rng, std::vector<double>& mask) {
  if (mode == Mode::eval || rate == 0.0) {
    mask.clear();
    return input;
  }
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

double attention_logit(std::span<const double> h_i, std::span<const double> h_j, const GatLayerParams& params,
                       std::size_t head) {
  const DenseMatrix& w = params.weights.at(head);
  if (h_i.size() != w.rows() || h_j.size() != w.rows()) throw Error("attention_logit: feature width mismatch");
  DenseMatrix hi(1, h_i.size(), std::vector<double>(h_i.begin(), h_i.end()));
  DenseMatrix hj(1, h_j.size(), std::vector<double>(h_j.begin(), h_j.end()));
  DenseMatrix zi = matmul(hi, w);
  DenseMatrix zj = matmul(hj, w);
  const double* a = params.kernels.at(head).values().data();
  const std::size_t f = w.cols();
  return leaky_relu(dot(a, zi.values().data(), f) + dot(a + f, zj.values().data(), f), params.leaky_alpha);
}

std::vector<double> attention_coefficients(std::span<const double> logits) {
  if (logits.empty()) throw Error("attention_coefficients: empty neighborhood");
  return softmax_row(logits);
}

GatLayerOutput gat_layer_forward(const Features& input, const SparseMatrix& pattern, const GatLayerParams& params,
                                 const DropoutSettings& dropout, GatLayerCache* cache) {
  params.validate();
  const std::size_t n = feature_rows(input);
  if (feature_cols(input) != params.in_dim())
    throw Error("GAT layer: input width " + std::to_string(feature_cols(input)) + " does not match weights " +
                std::to_string(params.in_dim()));
  if (pattern.rows() != n || pattern.cols() != n) throw Error("GAT layer: attention pattern does not match node count");
  for (std::size_t i = 0; i < n; ++i)
    if (pattern.row_cols(i).empty()) throw Error("GAT layer: node " + std::to_string(i) + " has an empty neighborhood");

  const auto& kern = simd::active();
  std::vector<double> input_mask;
  Features x = drop_input(input, dropout.input_rate, dropout.mode, dropout.rng, input_mask);

  const std::size_t heads = params.heads();
  const std::size_t f = params.head_dim();
  DenseMatrix pre(n, params.out_dim());
  GatLayerOutput out;
  std::vector<GatHeadCache> head_caches(heads);
  std::vector<double> src, dst;

  for (std::size_t k = 0; k < heads; ++k) {
    GatHeadCache& hc = head_caches[k];
    hc.z = multiply(x, params.weights[k]);
    project(hc.z, params.kernels[k], src, dst);

    hc.logits_in.resize(pattern.nnz());
    hc.alpha.resize(pattern.nnz());
    std::vector<double> logits;
    for (std::size_t i = 0; i < n; ++i) {
      auto cols = pattern.row_cols(i);
      auto weights = pattern.row_values(i);
      const std::size_t base = pattern.offsets()[i];
      logits.resize(cols.size());
      for (std::size_t e = 0; e < cols.size(); ++e) {
        double u = src[i] + dst[cols[e]];
        hc.logits_in[base + e] = u;
        logits[e] = leaky_relu(u, params.leaky_alpha);
        if (params.edge_weighting == EdgeWeighting::additive) logits[e] += weights[e];
      }
      softmax_row(logits, std::span<double>(hc.alpha.data() + base, cols.size()));
    }
    out.attention.push_back(pattern.with_values(hc.alpha));

    std::vector<double> alpha_used = hc.alpha;
    if (dropout.mode == Mode::train && dropout.attention_rate > 0.0) {
      if (!dropout.rng) throw Error("dropout in train mode needs a random generator");
      hc.alpha_mask = dropout_mask(alpha_used.size(), dropout.attention_rate, *dropout.rng, dropout.mode);
      apply_mask(alpha_used, hc.alpha_mask);
    }

    const std::size_t col0 = params.aggregation == HeadAggregation::concat ? k * f : 0;
    std::vector<double> acc(f);
    for (std::size_t i = 0; i < n; ++i) {
      auto cols = pattern.row_cols(i);
      const std::size_t base = pattern.offsets()[i];
      std::fill(acc.begin(), acc.end(), 0.0);
      for (std::size_t e = 0; e < cols.size(); ++e) kern.axpy(alpha_used[base + e], hc.z.row(cols[e]).data(), acc.data(), f);
      double* dst_row = pre.row(i).data() + col0;
      kern.axpy(1.0, acc.data(), dst_row, f);
    }
  }
  if (params.aggregation == HeadAggregation::average && heads > 1) {
    const double inv = 1.0 / static_cast<double>(heads);
    kern.scale(inv, pre.values().data(), pre.values().data(), pre.size());
  }

  switch (params.activation) {
    case GatActivation::elu:
      out.output = pre;
      for (double& v : out.output.values()) v = elu(v);
      break;
    case GatActivation::softmax:
      out.output = softmax_rows(pre);
      break;
    case GatActivation::none:
      out.output = pre;
      break;
  }

  if (cache) {
    cache->input = std::move(x);
    cache->input_mask = std::move(input_mask);
    cache->heads = std::move(head_caches);
    cache->preactivation = std::move(pre);
    cache->valid = true;
  }
  return out;
}

GatLayerGrads gat_layer_backward(const DenseMatrix& upstream, const SparseMatrix& pattern,
                                 const GatLayerParams& params, const GatLayerCache& cache) {
  if (!cache.valid) throw Error("GAT backward: missing forward cache");
  const std::size_t n = cache.preactivation.rows();
  if (upstream.rows() != n || upstream.cols() != params.out_dim()) throw Error("GAT backward: upstream shape mismatch");
  if (cache.heads.size() != params.heads()) throw Error("GAT backward: cache does not match parameters");

  const auto& kern = simd::active();
  DenseMatrix d_pre = upstream;
  if (params.activation == GatActivation::elu) {
    const auto pre = cache.preactivation.values();
    auto d = d_pre.values();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] *= elu_grad(pre[i]);
  }

  const std::size_t heads = params.heads();
  const std::size_t f = params.head_dim();
  const bool average = params.aggregation == HeadAggregation::average;
  const double head_scale = average && heads > 1 ? 1.0 / static_cast<double>(heads) : 1.0;

  GatLayerGrads grads;
  grads.params = params.zeros_like();
  const bool dense_input = std::holds_alternative<DenseMatrix>(cache.input);
  if (dense_input) grads.input = DenseMatrix(n, params.in_dim());

  DenseMatrix d_out(n, f);
  std::vector<double> d_alpha(pattern.nnz());
  std::vector<double> d_src(n), d_dst(n);

  for (std::size_t k = 0; k < heads; ++k) {
    const GatHeadCache& hc = cache.heads[k];
    const std::size_t col0 = average ? 0 : k * f;
    for (std::size_t i = 0; i < n; ++i) kern.scale(head_scale, d_pre.row(i).data() + col0, d_out.row(i).data(), f);

    DenseMatrix dz(n, f);
    // Aggregation: out_i = sum_j alpha'_ij z_j.
    for (std::size_t i = 0; i < n; ++i) {
      auto cols = pattern.row_cols(i);
      const std::size_t base = pattern.offsets()[i];
      const double* g = d_out.row(i).data();
      for (std::size_t e = 0; e < cols.size(); ++e) {
        double mask = hc.alpha_mask.empty() ? 1.0 : hc.alpha_mask[base + e];
        d_alpha[base + e] = dot(g, hc.z.row(cols[e]).data(), f) * mask;
        double a_used = hc.alpha[base + e] * mask;
        if (a_used != 0.0) kern.axpy(a_used, g, dz.row(cols[e]).data(), f);
      }
    }
    // Softmax and LeakyReLU, then the split into source/destination scores.
    std::fill(d_src.begin(), d_src.end(), 0.0);
    std::fill(d_dst.begin(), d_dst.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      auto cols = pattern.row_cols(i);
      const std::size_t base = pattern.offsets()[i];
      double s = 0.0;
      for (std::size_t e = 0; e < cols.size(); ++e) s += hc.alpha[base + e] * d_alpha[base + e];
      for (std::size_t e = 0; e < cols.size(); ++e) {
        double de = hc.alpha[base + e] * (d_alpha[base + e] - s);
        double du = de * leaky_relu_grad(hc.logits_in[base + e], params.leaky_alpha);
        d_src[i] += du;
        d_dst[cols[e]] += du;
      }
    }
    const double* a = params.kernels[k].values().data();
    double* da = grads.params.kernels[k].values().data();
    for (std::size_t i = 0; i < n; ++i) {
      const double* zi = hc.z.row(i).data();
      kern.axpy(d_src[i], zi, da, f);
      kern.axpy(d_dst[i], zi, da + f, f);
    }
    for (std::size_t i = 0; i < n; ++i) {
      kern.axpy(d_src[i], a, dz.row(i).data(), f);
      kern.axpy(d_dst[i], a + f, dz.row(i).data(), f);
    }

    grads.params.weights[k] = multiply_tn(cache.input, dz);
    if (dense_input) {
      DenseMatrix dx = matmul_nt(dz, params.weights[k]);
      axpy(1.0, dx, grads.input);
    }
  }
  if (dense_input) apply_mask(grads.input, cache.input_mask);
  return grads;
}

}  // namespace textgat

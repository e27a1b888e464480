#pragma once

#include <cstddef>
#include <vector>

#include "textgat/layers/dropout.hpp"
#include "textgat/layers/features.hpp"
#include "textgat/numcore/dense.hpp"
#include "textgat/numcore/rng.hpp"
#include "textgat/numcore/sparse.hpp"

namespace textgat {

enum class HeadAggregation { concat, average };
enum class GatActivation { elu, softmax, none };
// How adjacency weights enter attention: `mask` uses only the sparsity
// pattern; `additive` adds the edge weight to the post-LeakyReLU logit.
enum class EdgeWeighting { mask, additive };

// Per head k: weights[k] is F x F', kernels[k] is 1 x 2F' holding
// [a_src | a_dst], so e_ij = LeakyReLU(a_src . W h_i + a_dst . W h_j).
struct GatLayerParams {
  std::vector<DenseMatrix> weights;
  std::vector<DenseMatrix> kernels;
  double leaky_alpha = 0.2;
  HeadAggregation aggregation = HeadAggregation::concat;
  GatActivation activation = GatActivation::elu;
  EdgeWeighting edge_weighting = EdgeWeighting::mask;

  std::size_t heads() const { return weights.size(); }
  std::size_t in_dim() const { return weights.empty() ? 0 : weights.front().rows(); }
  std::size_t head_dim() const { return weights.empty() ? 0 : weights.front().cols(); }
  std::size_t out_dim() const { return aggregation == HeadAggregation::concat ? heads() * head_dim() : head_dim(); }

  // Zero tensors of the same shapes and the same options.
  GatLayerParams zeros_like() const;
  void validate() const;
};

// Attention coefficients of one head, stored on the attention pattern: row i
// holds alpha_ij for j in N_i (self included). Values are pre-dropout.
using AttentionRecord = SparseMatrix;

struct GatHeadCache {
  DenseMatrix z;                     // N x F'
  std::vector<double> logits_in;     // per edge, argument of LeakyReLU
  std::vector<double> alpha;         // per edge
  std::vector<double> alpha_mask;    // per edge dropout multipliers, empty if none
};

struct GatLayerCache {
  Features input;                    // after input dropout
  std::vector<double> input_mask;    // multipliers over input values, empty if none
  std::vector<GatHeadCache> heads;
  DenseMatrix preactivation;         // aggregated heads before activation
  bool valid = false;
};

struct GatLayerOutput {
  DenseMatrix output;
  std::vector<AttentionRecord> attention;  // one per head
};

struct DropoutSettings {
  double input_rate = 0.0;
  double attention_rate = 0.0;
  Mode mode = Mode::eval;
  Rng* rng = nullptr;  // required when mode == train and a rate is nonzero
};

// Single attention logit e_ij for head k.
double attention_logit(std::span<const double> h_i, std::span<const double> h_j, const GatLayerParams& params,
                       std::size_t head);

// Max-stabilized softmax over one neighborhood's logits.
std::vector<double> attention_coefficients(std::span<const double> logits);

// `pattern` supplies N_i as the stored columns of row i (and edge weights for
// EdgeWeighting::additive). Every row must be non-empty.
GatLayerOutput gat_layer_forward(const Features& input, const SparseMatrix& pattern, const GatLayerParams& params,
                                 const DropoutSettings& dropout, GatLayerCache* cache = nullptr);

struct GatLayerGrads {
  GatLayerParams params;  // gradients, same shapes as the parameters
  DenseMatrix input;      // dL/d(input); empty for sparse input
};

// `upstream` is dL/d(output) for elu/none layers and dL/d(preactivation) for
// softmax layers (the loss fuses softmax with cross-entropy).
GatLayerGrads gat_layer_backward(const DenseMatrix& upstream, const SparseMatrix& pattern,
                                 const GatLayerParams& params, const GatLayerCache& cache);

}  // namespace textgat

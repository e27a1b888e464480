#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "textgat/layers/gat.hpp"
#include "textgat/layers/gcn.hpp"

namespace textgat {

enum class Architecture { gat, gcn };
enum class L2Scope { first_layer, all };

std::string_view to_string(Architecture a);
Architecture parse_architecture(std::string_view s);
std::string_view to_string(L2Scope s);
L2Scope parse_l2_scope(std::string_view s);
std::string_view to_string(EdgeWeighting w);
EdgeWeighting parse_edge_weighting(std::string_view s);

// Two-layer node classifier. GAT: `heads` attention heads of width
// `hidden_units`, concatenated and passed through ELU, then `output_heads`
// heads of width `classes`, averaged and softmaxed. GCN: hidden width
// hidden_units * heads with ReLU, then softmax.
struct ModelConfig {
  Architecture architecture = Architecture::gat;
  std::size_t input_dim = 0;
  std::size_t hidden_units = 8;
  std::size_t heads = 8;
  std::size_t output_heads = 1;
  std::size_t classes = 0;
  double dropout = 0.5;
  bool attention_dropout = true;
  double leaky_alpha = 0.2;
  double l2 = 5e-4;
  L2Scope l2_scope = L2Scope::first_layer;
  EdgeWeighting edge_weighting = EdgeWeighting::mask;

  void validate() const;
  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

struct ModelParams {
  GatLayerParams gat_hidden;
  GatLayerParams gat_output;
  GcnLayerParams gcn_hidden;
  GcnLayerParams gcn_output;
  Architecture architecture = Architecture::gat;

  // Tensors in declared order: GAT hidden W^1..W^K, a^1..a^K, then output
  // W, a; GCN W0, W1. This is the checkpoint order.
  std::vector<DenseMatrix*> tensors();
  std::vector<const DenseMatrix*> tensors() const;
  std::vector<std::string> tensor_names() const;
  std::vector<const DenseMatrix*> l2_tensors(L2Scope scope) const;
  std::size_t parameter_count() const;
};

// Zero-filled parameters of the right shapes.
ModelParams make_params(const ModelConfig& config);
// Glorot-uniform draws in +-sqrt(6 / (fan_in + fan_out)), tensor by tensor in
// declared order. An attention kernel of width 2F' uses fan_in 2F', fan_out 1.
ModelParams init_params(const ModelConfig& config, Rng& rng);

struct ModelInputs {
  Features features;         // N x input_dim
  SparseMatrix pattern;      // attention neighborhoods (adjacency with self-loops)
  SparseMatrix a_hat;        // normalized adjacency for GCN
};

struct ForwardPass {
  DenseMatrix probs;  // N x classes
  std::vector<AttentionRecord> hidden_attention;
  std::vector<AttentionRecord> output_attention;
  GatLayerCache gat_hidden_cache, gat_output_cache;
  GcnLayerCache gcn_hidden_cache, gcn_output_cache;
};

ForwardPass model_forward(const ModelConfig& config, const ModelParams& params, const ModelInputs& inputs, Mode mode,
                          Rng* rng);

struct LossAndGrad {
  double loss = 0.0;       // data term + L2
  double data_loss = 0.0;
  ModelParams grads;
  DenseMatrix probs;
};

// Forward, masked cross-entropy with L2 over config.l2_scope, and backward.
// `scale` multiplies the loss (and so every gradient).
LossAndGrad loss_and_grad(const ModelConfig& config, const ModelParams& params, const ModelInputs& inputs,
                          std::span<const std::size_t> labels, std::span<const std::size_t> nodes, Mode mode, Rng* rng,
                          double scale = 1.0);

}  // namespace textgat

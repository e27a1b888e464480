#include "textgat/layers/model.hpp"

#include <algorithm>
#include <cmath>

#include "textgat/error.hpp"
#include "textgat/layers/loss.hpp"

namespace textgat {

std::string_view to_string(Architecture a) { return a == Architecture::gat ? "gat" : "gcn"; }

Architecture parse_architecture(std::string_view s) {
  if (s == "gat") return Architecture::gat;
  if (s == "gcn") return Architecture::gcn;
  throw Error("unknown architecture '" + std::string(s) + "' (expected gat or gcn)");
}

std::string_view to_string(L2Scope s) { return s == L2Scope::first_layer ? "first_layer" : "all"; }

L2Scope parse_l2_scope(std::string_view s) {
  if (s == "first_layer") return L2Scope::first_layer;
  if (s == "all") return L2Scope::all;
  throw Error("unknown l2 scope '" + std::string(s) + "' (expected first_layer or all)");
}

std::string_view to_string(EdgeWeighting w) { return w == EdgeWeighting::mask ? "mask" : "additive"; }

EdgeWeighting parse_edge_weighting(std::string_view s) {
  if (s == "mask") return EdgeWeighting::mask;
  if (s == "additive") return EdgeWeighting::additive;
  throw Error("unknown edge weighting '" + std::string(s) + "' (expected mask or additive)");
}

void ModelConfig::validate() const {
  if (input_dim == 0) throw Error("model: input dimension must be positive");
  if (classes < 2) throw Error("model: need at least 2 classes");
  if (hidden_units == 0 || heads == 0 || output_heads == 0) throw Error("model: hidden units and head counts must be positive");
  if (dropout < 0.0 || dropout >= 1.0) throw Error("model: dropout must be in [0, 1)");
  if (leaky_alpha < 0.0) throw Error("model: leaky slope must be non-negative");
  if (l2 < 0.0) throw Error("model: l2 must be non-negative");
}

std::vector<DenseMatrix*> ModelParams::tensors() {
  std::vector<DenseMatrix*> out;
  if (architecture == Architecture::gat) {
    for (GatLayerParams* layer : {&gat_hidden, &gat_output}) {
      for (auto& w : layer->weights) out.push_back(&w);
      for (auto& a : layer->kernels) out.push_back(&a);
    }
  } else {
    out.push_back(&gcn_hidden.weight);
    out.push_back(&gcn_output.weight);
  }
  return out;
}

std::vector<const DenseMatrix*> ModelParams::tensors() const {
  auto mut = const_cast<ModelParams*>(this)->tensors();
  return {mut.begin(), mut.end()};
}

std::vector<std::string> ModelParams::tensor_names() const {
  std::vector<std::string> names;
  if (architecture == Architecture::gat) {
    for (auto [prefix, layer] : {std::pair{"hidden", &gat_hidden}, std::pair{"output", &gat_output}}) {
      for (std::size_t k = 0; k < layer->heads(); ++k) names.push_back(std::string(prefix) + ".W" + std::to_string(k));
      for (std::size_t k = 0; k < layer->heads(); ++k) names.push_back(std::string(prefix) + ".a" + std::to_string(k));
    }
  } else {
    names = {"hidden.W", "output.W"};
  }
  return names;
}

std::vector<const DenseMatrix*> ModelParams::l2_tensors(L2Scope scope) const {
  if (scope == L2Scope::all) return tensors();
  std::vector<const DenseMatrix*> out;
  if (architecture == Architecture::gat) {
    for (const auto& w : gat_hidden.weights) out.push_back(&w);
    for (const auto& a : gat_hidden.kernels) out.push_back(&a);
  } else {
    out.push_back(&gcn_hidden.weight);
  }
  return out;
}

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto* t : tensors()) n += t->size();
  return n;
}

ModelParams make_params(const ModelConfig& c) {
  c.validate();
  ModelParams p;
  p.architecture = c.architecture;
  if (c.architecture == Architecture::gat) {
    auto layer = [&](std::size_t heads, std::size_t in, std::size_t out, HeadAggregation agg, GatActivation act) {
      GatLayerParams l;
      for (std::size_t k = 0; k < heads; ++k) {
        l.weights.emplace_back(in, out);
        l.kernels.emplace_back(1, 2 * out);
      }
      l.leaky_alpha = c.leaky_alpha;
      l.aggregation = agg;
      l.activation = act;
      l.edge_weighting = c.edge_weighting;
      return l;
    };
    p.gat_hidden = layer(c.heads, c.input_dim, c.hidden_units, HeadAggregation::concat, GatActivation::elu);
    p.gat_output = layer(c.output_heads, c.heads * c.hidden_units, c.classes, HeadAggregation::average,
                         GatActivation::softmax);
  } else {
    const std::size_t hidden = c.hidden_units * c.heads;
    p.gcn_hidden = {DenseMatrix(c.input_dim, hidden), GcnActivation::relu};
    p.gcn_output = {DenseMatrix(hidden, c.classes), GcnActivation::softmax};
  }
  return p;
}

namespace {
void glorot(DenseMatrix& t, double fan_in, double fan_out, Rng& rng) {
  const double bound = std::sqrt(6.0 / (fan_in + fan_out));
  for (double& v : t.values()) v = rng.uniform(-bound, bound);
}
}  // namespace

ModelParams init_params(const ModelConfig& c, Rng& rng) {
  ModelParams p = make_params(c);
  if (c.architecture == Architecture::gat) {
    for (GatLayerParams* layer : {&p.gat_hidden, &p.gat_output}) {
      for (auto& w : layer->weights) glorot(w, static_cast<double>(w.rows()), static_cast<double>(w.cols()), rng);
      // A kernel is stored 1 x 2F' and acts as a 2F' -> 1 map.
      for (auto& a : layer->kernels) glorot(a, static_cast<double>(a.cols()), 1.0, rng);
    }
  } else {
    for (DenseMatrix* w : p.tensors()) glorot(*w, static_cast<double>(w->rows()), static_cast<double>(w->cols()), rng);
  }
  return p;
}

ForwardPass model_forward(const ModelConfig& c, const ModelParams& params, const ModelInputs& inputs, Mode mode,
                          Rng* rng) {
  ForwardPass fp;
  if (c.architecture == Architecture::gat) {
    DropoutSettings d{c.dropout, c.attention_dropout ? c.dropout : 0.0, mode, rng};
    GatLayerOutput h = gat_layer_forward(inputs.features, inputs.pattern, params.gat_hidden, d, &fp.gat_hidden_cache);
    fp.hidden_attention = std::move(h.attention);
    GatLayerOutput o =
        gat_layer_forward(Features{std::move(h.output)}, inputs.pattern, params.gat_output, d, &fp.gat_output_cache);
    fp.output_attention = std::move(o.attention);
    fp.probs = std::move(o.output);
  } else {
    DenseMatrix h =
        gcn_layer_forward(inputs.features, inputs.a_hat, params.gcn_hidden, c.dropout, mode, rng, &fp.gcn_hidden_cache);
    fp.probs = gcn_layer_forward(Features{std::move(h)}, inputs.a_hat, params.gcn_output, c.dropout, mode, rng,
                                 &fp.gcn_output_cache);
  }
  return fp;
}

LossAndGrad loss_and_grad(const ModelConfig& c, const ModelParams& params, const ModelInputs& inputs,
                          std::span<const std::size_t> labels, std::span<const std::size_t> nodes, Mode mode, Rng* rng,
                          double scale) {
  ForwardPass fp = model_forward(c, params, inputs, mode, rng);
  LossAndGrad out;
  auto l2_list = params.l2_tensors(c.l2_scope);
  out.data_loss = cross_entropy(fp.probs, labels, nodes);
  out.loss = scale * (out.data_loss + l2_penalty(l2_list, c.l2));

  DenseMatrix d_logits = cross_entropy_logit_grad(fp.probs, labels, nodes);
  if (scale != 1.0)
    for (double& v : d_logits.values()) v *= scale;

  out.grads = make_params(c);
  if (c.architecture == Architecture::gat) {
    GatLayerGrads go = gat_layer_backward(d_logits, inputs.pattern, params.gat_output, fp.gat_output_cache);
    GatLayerGrads gh = gat_layer_backward(go.input, inputs.pattern, params.gat_hidden, fp.gat_hidden_cache);
    out.grads.gat_output.weights = std::move(go.params.weights);
    out.grads.gat_output.kernels = std::move(go.params.kernels);
    out.grads.gat_hidden.weights = std::move(gh.params.weights);
    out.grads.gat_hidden.kernels = std::move(gh.params.kernels);
  } else {
    GcnLayerGrads go = gcn_layer_backward(d_logits, inputs.a_hat, params.gcn_output, fp.gcn_output_cache);
    GcnLayerGrads gh = gcn_layer_backward(go.input, inputs.a_hat, params.gcn_hidden, fp.gcn_hidden_cache);
    out.grads.gcn_output.weight = std::move(go.weight);
    out.grads.gcn_hidden.weight = std::move(gh.weight);
  }

  // d/dw of scale * lambda * w^2.
  const double l2_coef = 2.0 * c.l2 * scale;
  if (l2_coef != 0.0) {
    auto grads = out.grads.tensors();
    auto values = params.tensors();
    auto l2_set = params.l2_tensors(c.l2_scope);
    for (std::size_t t = 0; t < values.size(); ++t)
      if (std::find(l2_set.begin(), l2_set.end(), values[t]) != l2_set.end()) axpy(l2_coef, *values[t], *grads[t]);
  }
  out.probs = std::move(fp.probs);
  return out;
}

}  // namespace textgat

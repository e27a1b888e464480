#pragma once

#include "textgat/layers/dropout.hpp"
#include "textgat/layers/features.hpp"
#include "textgat/numcore/sparse.hpp"

namespace textgat {

enum class GcnActivation { relu, softmax, none };

struct GcnLayerParams {
  DenseMatrix weight;  // F x F_out
  GcnActivation activation = GcnActivation::relu;
};

struct GcnLayerCache {
  Features input;                  // after dropout
  std::vector<double> input_mask;
  DenseMatrix preactivation;       // A_hat * X * W
  bool valid = false;
};

// act(A_hat * drop(X) * W). X * W is formed first, then propagated.
DenseMatrix gcn_layer_forward(const Features& input, const SparseMatrix& a_hat, const GcnLayerParams& params,
                              double dropout_rate, Mode mode, Rng* rng, GcnLayerCache* cache = nullptr);

struct GcnLayerGrads {
  DenseMatrix weight;
  DenseMatrix input;  // empty for sparse input
};

// Same upstream convention as the GAT layer: dL/d(preactivation) for softmax
// layers, dL/d(output) otherwise.
GcnLayerGrads gcn_layer_backward(const DenseMatrix& upstream, const SparseMatrix& a_hat, const GcnLayerParams& params,
                                 const GcnLayerCache& cache);

// softmax(A_hat ReLU(A_hat X W0) W1), no dropout.
DenseMatrix gcn_forward(const Features& x, const SparseMatrix& a_hat, const DenseMatrix& w0, const DenseMatrix& w1);

}  // namespace textgat

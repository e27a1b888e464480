#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "textgat/numcore/dense.hpp"

namespace textgat {

// Mean over `nodes` of -ln probs(node, labels[node]). `labels` is indexed by
// node (entries for unlisted nodes are ignored).
double cross_entropy(const DenseMatrix& probs, std::span<const std::size_t> labels, std::span<const std::size_t> nodes);

// Gradient of cross_entropy with respect to the logits feeding a row softmax:
// (p - onehot) / |nodes| on listed rows, zero elsewhere.
DenseMatrix cross_entropy_logit_grad(const DenseMatrix& probs, std::span<const std::size_t> labels,
                                     std::span<const std::size_t> nodes);

// lambda * sum of squared entries over the given tensors.
double l2_penalty(std::span<const DenseMatrix* const> tensors, double lambda);

// Data term plus L2 term.
double masked_cross_entropy(const DenseMatrix& probs, std::span<const std::size_t> labels,
                            std::span<const std::size_t> nodes, std::span<const DenseMatrix* const> l2_tensors,
                            double lambda);

}  // namespace textgat

#include "textgat/layers/loss.hpp"

#include <cmath>
#include <string>

#include "textgat/error.hpp"

namespace textgat {

namespace {
void check(const DenseMatrix& probs, std::span<const std::size_t> labels, std::span<const std::size_t> nodes) {
  if (nodes.empty()) throw Error("cross-entropy: empty node mask");
  for (std::size_t v : nodes) {
    if (v >= probs.rows() || v >= labels.size()) throw Error("cross-entropy: node " + std::to_string(v) + " out of range");
    if (labels[v] >= probs.cols()) throw Error("cross-entropy: label out of range at node " + std::to_string(v));
  }
}
}  // namespace

double cross_entropy(const DenseMatrix& probs, std::span<const std::size_t> labels, std::span<const std::size_t> nodes) {
  check(probs, labels, nodes);
  double sum = 0.0;
  for (std::size_t v : nodes) sum -= std::log(probs(v, labels[v]));
  return sum / static_cast<double>(nodes.size());
}

DenseMatrix cross_entropy_logit_grad(const DenseMatrix& probs, std::span<const std::size_t> labels,
                                     std::span<const std::size_t> nodes) {
  check(probs, labels, nodes);
  DenseMatrix g(probs.rows(), probs.cols());
  const double inv = 1.0 / static_cast<double>(nodes.size());
  for (std::size_t v : nodes) {
    for (std::size_t c = 0; c < probs.cols(); ++c) g(v, c) = probs(v, c) * inv;
    g(v, labels[v]) -= inv;
  }
  return g;
}

double l2_penalty(std::span<const DenseMatrix* const> tensors, double lambda) {
  double s = 0.0;
  for (const DenseMatrix* t : tensors) s += sum_of_squares(*t);
  return lambda * s;
}

double masked_cross_entropy(const DenseMatrix& probs, std::span<const std::size_t> labels,
                            std::span<const std::size_t> nodes, std::span<const DenseMatrix* const> l2_tensors,
                            double lambda) {
  return cross_entropy(probs, labels, nodes) + l2_penalty(l2_tensors, lambda);
}

}  // namespace textgat

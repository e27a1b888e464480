#pragma once

// Independent reference implementations and fixtures shared by the unit tests
// and the acceptance runner. Everything here is deliberately naive: dense
// loops, direct formulas, no reuse of the library's internals beyond its
// public data types.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "textgat/corpus.hpp"
#include "textgat/eval.hpp"
#include "textgat/graph.hpp"
#include "textgat/layers/gat.hpp"
#include "textgat/layers/model.hpp"
#include "textgat/numcore/dense.hpp"
#include "textgat/numcore/gradcheck.hpp"
#include "textgat/numcore/rng.hpp"

namespace textgat::testing {

// Word-mode corpus from space-separated texts. Labels and splits default to
// "x" / train when the vectors are shorter than `texts`.
Corpus make_corpus(const std::vector<std::string>& texts, const std::vector<std::string>& labels = {},
                   const std::vector<Split>& splits = {});

// Edge weights evaluated pair by pair from raw token lists: documents first,
// then byte-sorted distinct terms. `isolated` receives the indices of
// documents without a positive document-term weight.
DenseMatrix brute_adjacency(const std::vector<std::vector<std::string>>& docs, std::size_t window_size,
                            std::vector<std::size_t>* isolated = nullptr);

// Random word-mode corpus over a small alphabet of terms t00, t01, ...
Corpus random_corpus(Rng& rng, std::size_t max_docs, std::size_t max_vocab, std::size_t max_len);

// 3 documents ("a b", "c b", "d") and 4 terms: 7 nodes, two classes,
// documents 0 and 1 in train, document 2 in val.
TextGraph seven_node_graph();

// Random symmetric 0/1 pattern with unit diagonal.
SparseMatrix random_pattern(std::size_t n, double edge_prob, Rng& rng);

// GAT layer evaluated node by node from the definition (eval mode, mask
// edge weighting).
DenseMatrix naive_gat_layer(const DenseMatrix& h, const SparseMatrix& pattern, const GatLayerParams& params);

// softmax(A relu(A X W0) W1) with dense triple loops.
DenseMatrix dense_gcn(const DenseMatrix& x, const DenseMatrix& a_hat, const DenseMatrix& w0, const DenseMatrix& w1);

// Metrics recomputed from raw (pred, label) pairs in exact rational
// arithmetic, converted to double at the end.
MetricsReport exact_metrics(const std::vector<std::size_t>& preds, const std::vector<std::size_t>& labels,
                            std::size_t classes);

// Largest absolute difference between two reports, field by field.
double report_distance(const MetricsReport& a, const MetricsReport& b);

// All parameters flattened in declared tensor order, and back.
std::vector<double> flatten(const ModelParams& params);
void unflatten(std::span<const double> flat, ModelParams& params);

// Finite-difference check of loss_and_grad over `samples` coordinates (0 =
// all). Train mode reseeds the dropout stream identically for every call.
GradCheckResult check_model_gradient(const ModelConfig& config, const ModelParams& params, const ModelInputs& inputs,
                                     const std::vector<std::size_t>& labels, const std::vector<std::size_t>& nodes,
                                     Mode mode, std::size_t samples, std::uint64_t seed = 7);

DenseMatrix random_dense(std::size_t rows, std::size_t cols, Rng& rng, double lo = -1.0, double hi = 1.0);

}  // namespace textgat::testing

#include <algorithm>
#include <cmath>
#include <map>

#include "textgat/error.hpp"
#include "textgat/graph.hpp"

namespace textgat {

std::vector<std::size_t> TextGraph::nodes_in(Split s) const {
  std::vector<std::size_t> out;
  for (std::size_t d = 0; d < n_docs; ++d)
    if (splits[d] == s) out.push_back(d);
  return out;
}

std::size_t TextGraph::edge_count() const {
  std::size_t off_diag = adjacency.nnz();
  for (std::size_t i = 0; i < adjacency.rows(); ++i)
    if (adjacency.find(i, i) != adjacency.nnz()) --off_diag;
  return off_diag / 2;
}

TextGraph build_graph(const Corpus& corpus, const Vocabulary& vocab, std::size_t window_size,
                      bool allow_isolated_documents) {
  if (corpus.documents.empty()) throw Error("build_graph: empty corpus");
  const WindowStats stats = count_windows(corpus, vocab, window_size);

  TextGraph g;
  g.n_docs = corpus.size();
  g.n_terms = vocab.size();
  g.window_size = window_size;
  g.total_windows = stats.total();
  g.class_names = corpus.label_names();
  g.terms = vocab.terms();

  const std::size_t n = g.n_nodes();
  std::vector<Triplet> entries;
  for (std::size_t i = 0; i < n; ++i) entries.push_back({i, i, 1.0});

  for (std::size_t d = 0; d < g.n_docs; ++d) {
    const Document& doc = corpus.documents[d];
    auto label = std::lower_bound(g.class_names.begin(), g.class_names.end(), doc.label);
    g.labels.push_back(static_cast<std::size_t>(label - g.class_names.begin()));
    g.splits.push_back(doc.split);
    g.doc_ids.push_back(doc.id);

    std::map<std::size_t, std::size_t> tf;
    for (const auto& t : doc.tokens) {
      std::size_t id = vocab.index_of(t);
      if (id == vocab.size()) throw Error("document '" + doc.id + "' has token outside the vocabulary: " + t);
      ++tf[id];
    }
    bool connected = false;
    for (const auto& [term, count] : tf) {
      if (auto w = tf_idf_weight(count, vocab.document_frequency(term), g.n_docs)) {
        entries.push_back({d, g.n_docs + term, *w});
        entries.push_back({g.n_docs + term, d, *w});
        connected = true;
      }
    }
    if (!connected && !allow_isolated_documents) throw Error("document '" + doc.id + "' has no positive TF-IDF edge (isolated node)");
  }

  for (const auto& [i, j, count] : stats.pairs()) {
    (void)count;
    if (auto w = pmi(stats, i, j)) {
      entries.push_back({g.n_docs + i, g.n_docs + j, *w});
      entries.push_back({g.n_docs + j, g.n_docs + i, *w});
    }
  }
  g.adjacency = SparseMatrix::from_triplets(n, n, std::move(entries));
  return g;
}

SparseMatrix normalize_adjacency(const SparseMatrix& adjacency) {
  const std::size_t n = adjacency.rows();
  if (adjacency.cols() != n) throw Error("normalize_adjacency: adjacency must be square");
  std::vector<Triplet> entries;
  entries.reserve(adjacency.nnz() + n);
  for (std::size_t r = 0; r < n; ++r) {
    auto cols = adjacency.row_cols(r);
    auto vals = adjacency.row_values(r);
    for (std::size_t k = 0; k < cols.size(); ++k) entries.push_back({r, cols[k], vals[k]});
    entries.push_back({r, r, 1.0});
  }
  SparseMatrix tilde = SparseMatrix::from_triplets(n, n, std::move(entries));

  std::vector<double> inv_sqrt(n);
  for (std::size_t r = 0; r < n; ++r) {
    double deg = 0.0;
    for (double v : tilde.row_values(r)) deg += v;
    if (!(deg > 0.0)) throw Error("normalize_adjacency: non-positive degree at node " + std::to_string(r));
    inv_sqrt[r] = 1.0 / std::sqrt(deg);
  }
  std::vector<double> values(tilde.values().begin(), tilde.values().end());
  for (std::size_t r = 0; r < n; ++r) {
    auto cols = tilde.row_cols(r);
    std::size_t base = tilde.offsets()[r];
    for (std::size_t k = 0; k < cols.size(); ++k) values[base + k] *= inv_sqrt[r] * inv_sqrt[cols[k]];
  }
  return tilde.with_values(std::move(values));
}

}  // namespace textgat

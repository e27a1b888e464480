#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "textgat/corpus.hpp"
#include "textgat/numcore/sparse.hpp"

namespace textgat {

// Sliding-window occurrence counts over a corpus. Term ids are vocabulary
// indices; pair counts are keyed by unordered pair.
class WindowStats {
 public:
  WindowStats() = default;
  WindowStats(std::size_t window_size, std::size_t n_terms) : window_size_(window_size), term_windows_(n_terms, 0) {}

  std::size_t window_size() const { return window_size_; }
  std::uint64_t total() const { return total_; }
  std::size_t n_terms() const { return term_windows_.size(); }
  std::uint64_t term(std::size_t i) const { return term_windows_.at(i); }
  std::uint64_t pair(std::size_t i, std::size_t j) const;
  // Unordered pairs with a nonzero count, as (i, j, count) with i < j, sorted.
  std::vector<std::tuple<std::size_t, std::size_t, std::uint64_t>> pairs() const;

  // Counts one window given its distinct, ascending term ids.
  void add_window(const std::vector<std::size_t>& distinct_terms);

 private:
  static std::uint64_t key(std::size_t i, std::size_t j) {
    return (static_cast<std::uint64_t>(i) << 32) | static_cast<std::uint64_t>(j);
  }
  std::size_t window_size_ = 0;
  std::uint64_t total_ = 0;
  std::vector<std::uint64_t> term_windows_;
  std::unordered_map<std::uint64_t, std::uint64_t> pair_windows_;
};

// A document of length L contributes windows starting at 0..max(0, L - ws),
// i.e. max(1, L - ws + 1) windows; a shorter document is a single window.
// Terms and pairs count at most once per window.
WindowStats count_windows(const Corpus& corpus, const Vocabulary& vocab, std::size_t window_size);

// Positive pointwise mutual information of two distinct terms, or nullopt when
// they never share a window or the value is not positive.
std::optional<double> pmi(const WindowStats& stats, std::size_t i, std::size_t j);

// tf * ln(n_docs / (1 + df)); nullopt when tf is zero or the product is not
// positive.
std::optional<double> tf_idf_weight(std::size_t tf, std::size_t df, std::size_t n_docs);
std::optional<double> tf_idf(const Corpus& corpus, const Vocabulary& vocab, const Document& doc, std::string_view term);

// Heterogeneous document/term graph. Node k < n_docs is document k (corpus
// order); node n_docs + t is vocabulary term t.
struct TextGraph {
  std::size_t n_docs = 0;
  std::size_t n_terms = 0;
  std::size_t window_size = 0;
  std::uint64_t total_windows = 0;
  // Symmetric; unit diagonal; PMI term-term and TF-IDF document-term weights.
  SparseMatrix adjacency;
  std::vector<std::string> class_names;
  std::vector<std::size_t> labels;  // per document
  std::vector<Split> splits;        // per document
  std::vector<std::string> doc_ids;
  std::vector<std::string> terms;

  std::size_t n_nodes() const { return n_docs + n_terms; }
  std::size_t n_classes() const { return class_names.size(); }
  // Document node indices in the given split, ascending.
  std::vector<std::size_t> nodes_in(Split s) const;
  // Off-diagonal stored entries counted once per unordered pair.
  std::size_t edge_count() const;

  friend bool operator==(const TextGraph&, const TextGraph&) = default;
};

// Throws when a document has no positive TF-IDF edge (the error names it),
// unless `allow_isolated_documents` is set; such a document keeps only its
// self-loop.
TextGraph build_graph(const Corpus& corpus, const Vocabulary& vocab, std::size_t window_size,
                      bool allow_isolated_documents = false);

// D^-1/2 (A + I) D^-1/2 with weighted degrees of A + I. Entry (i, j) is
// (A + I)_ij * (d_i^-1/2 * d_j^-1/2), which is exactly symmetric.
SparseMatrix normalize_adjacency(const SparseMatrix& adjacency);
inline SparseMatrix normalize_adjacency(const TextGraph& graph) { return normalize_adjacency(graph.adjacency); }

inline constexpr std::uint32_t kGraphFormatVersion = 1;

void write_graph(const TextGraph& graph, std::ostream& out);
TextGraph read_graph(std::istream& in);
void save_graph(const TextGraph& graph, const std::string& path);
TextGraph load_graph(const std::string& path);

}  // namespace textgat

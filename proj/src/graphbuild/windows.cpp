#include <algorithm>
#include <cmath>
#include <tuple>

#include "textgat/error.hpp"
#include "textgat/graph.hpp"

namespace textgat {

std::uint64_t WindowStats::pair(std::size_t i, std::size_t j) const {
  if (i == j) return term(i);
  if (i > j) std::swap(i, j);
  auto it = pair_windows_.find(key(i, j));
  return it == pair_windows_.end() ? 0 : it->second;
}

std::vector<std::tuple<std::size_t, std::size_t, std::uint64_t>> WindowStats::pairs() const {
  std::vector<std::tuple<std::size_t, std::size_t, std::uint64_t>> out;
  out.reserve(pair_windows_.size());
  for (const auto& [k, count] : pair_windows_)
    out.emplace_back(static_cast<std::size_t>(k >> 32), static_cast<std::size_t>(k & 0xFFFFFFFFu), count);
  std::sort(out.begin(), out.end());
  return out;
}

void WindowStats::add_window(const std::vector<std::size_t>& distinct_terms) {
  ++total_;
  for (std::size_t a = 0; a < distinct_terms.size(); ++a) {
    ++term_windows_.at(distinct_terms[a]);
    for (std::size_t b = a + 1; b < distinct_terms.size(); ++b) ++pair_windows_[key(distinct_terms[a], distinct_terms[b])];
  }
}

WindowStats count_windows(const Corpus& corpus, const Vocabulary& vocab, std::size_t window_size) {
  if (window_size == 0) throw Error("window size must be at least 1");
  if (vocab.size() > 0xFFFFFFFFu) throw Error("vocabulary too large");
  WindowStats stats(window_size, vocab.size());
  std::vector<std::size_t> ids;
  std::vector<std::size_t> window;
  for (const auto& doc : corpus.documents) {
    ids.clear();
    for (const auto& t : doc.tokens) {
      std::size_t id = vocab.index_of(t);
      if (id == vocab.size()) throw Error("document '" + doc.id + "' has token outside the vocabulary: " + t);
      ids.push_back(id);
    }
    const std::size_t len = ids.size();
    const std::size_t n_windows = len > window_size ? len - window_size + 1 : 1;
    for (std::size_t start = 0; start < n_windows; ++start) {
      const std::size_t end = std::min(len, start + window_size);
      window.assign(ids.begin() + static_cast<std::ptrdiff_t>(start), ids.begin() + static_cast<std::ptrdiff_t>(end));
      std::sort(window.begin(), window.end());
      window.erase(std::unique(window.begin(), window.end()), window.end());
      stats.add_window(window);
    }
  }
  return stats;
}

std::optional<double> pmi(const WindowStats& stats, std::size_t i, std::size_t j) {
  if (i == j) throw Error("pmi: terms must differ");
  const std::uint64_t joint = stats.pair(i, j);
  if (joint == 0) return std::nullopt;
  const double w = static_cast<double>(stats.total());
  const double p_ij = static_cast<double>(joint) / w;
  const double p_i = static_cast<double>(stats.term(i)) / w;
  const double p_j = static_cast<double>(stats.term(j)) / w;
  const double v = std::log(p_ij / (p_i * p_j));
  if (!(v > 0.0)) return std::nullopt;
  return v;
}

std::optional<double> tf_idf_weight(std::size_t tf, std::size_t df, std::size_t n_docs) {
  if (tf == 0) return std::nullopt;
  const double idf = std::log(static_cast<double>(n_docs) / static_cast<double>(df + 1));
  const double v = static_cast<double>(tf) * idf;
  if (!(v > 0.0)) return std::nullopt;
  return v;
}

std::optional<double> tf_idf(const Corpus& corpus, const Vocabulary& vocab, const Document& doc, std::string_view term) {
  std::size_t id = vocab.index_of(term);
  if (id == vocab.size()) throw Error("tf_idf: term not in vocabulary: " + std::string(term));
  std::size_t tf = static_cast<std::size_t>(std::count(doc.tokens.begin(), doc.tokens.end(), term));
  return tf_idf_weight(tf, vocab.document_frequency(id), corpus.size());
}

}  // namespace textgat

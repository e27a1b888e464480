#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace textgat {

enum class Split { train, val, test };
enum class TokenMode { character, word };

std::string_view to_string(Split s);
Split parse_split(std::string_view s);
std::string_view to_string(TokenMode m);
TokenMode parse_token_mode(std::string_view s);

struct Document {
  std::string id;
  std::string raw_text;
  std::vector<std::string> tokens;
  std::string label;
  Split split = Split::train;

  friend bool operator==(const Document&, const Document&) = default;
};

// Documents in file order. Labels are the sorted set of distinct class names;
// a document's class index is its label's position in that list.
struct Corpus {
  TokenMode mode = TokenMode::word;
  std::vector<Document> documents;

  std::size_t size() const { return documents.size(); }
  std::vector<std::string> label_names() const;

  friend bool operator==(const Corpus&, const Corpus&) = default;
};

class Vocabulary {
 public:
  Vocabulary() = default;

  std::size_t size() const { return terms_.size(); }
  const std::string& term(std::size_t index) const { return terms_.at(index); }
  const std::vector<std::string>& terms() const { return terms_; }
  // Index of `term`, or size() when absent.
  std::size_t index_of(std::string_view term) const;
  bool contains(std::string_view term) const { return index_of(term) != size(); }
  std::size_t document_frequency(std::size_t index) const { return df_.at(index); }

 private:
  friend Vocabulary build_vocabulary(const Corpus& corpus);
  std::vector<std::string> terms_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::size_t> df_;
};

struct CorpusStats {
  std::size_t documents = 0;
  std::size_t min_len = 0;
  std::size_t max_len = 0;
  double mean_len = 0.0;
  std::map<std::string, std::size_t> class_counts;
  std::map<std::string, std::size_t> split_counts;
};

// Splits text into tokens. Character mode yields one token per non-whitespace
// code point; word mode splits on ' ' and drops empty pieces.
std::vector<std::string> tokenize(std::string_view text, TokenMode mode);

// Parses the JSON-lines corpus format. Lines carrying a "tokens" array (the
// canonical form written by write_corpus) keep those tokens as-is; otherwise
// the text is tokenized in `mode`. Blank lines are skipped.
Corpus parse_corpus(std::istream& in, TokenMode mode);
Corpus ingest(const std::string& path, TokenMode mode);

// Canonical form: one JSON object per line with keys id, text, label, split,
// tokens, in that order.
void write_corpus(const Corpus& corpus, std::ostream& out);

std::set<std::string> parse_stoplist(std::istream& in);
std::set<std::string> load_stoplist(const std::string& path);

// Both filters reject documents that end up with no tokens; the error lists
// every offending id.
Corpus remove_stopwords(const Corpus& corpus, const std::set<std::string>& stoplist);
// Keeps only tokens containing at least one letter, digit or ideograph.
Corpus strip_special_tokens(const Corpus& corpus);

// When no document is in the validation split, moves floor(fraction * n_train)
// training documents (at least one when n_train >= 2), drawn with `seed`, to
// validation. Otherwise returns the corpus unchanged.
Corpus ensure_validation_split(const Corpus& corpus, double fraction, std::uint64_t seed);

// Terms sorted by byte order; covers every token of every split.
Vocabulary build_vocabulary(const Corpus& corpus);

CorpusStats corpus_stats(const Corpus& corpus);
std::string stats_to_json(const CorpusStats& stats);

}  // namespace textgat

#include "textgat/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_set>

#include "json.hpp"
#include "textgat/error.hpp"
#include "textgat/numcore/rng.hpp"
#include "textgat/utf8.hpp"

namespace textgat {

using nlohmann::json;

std::string_view to_string(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
  }
  return "?";
}

Split parse_split(std::string_view s) {
  if (s == "train") return Split::train;
  if (s == "val") return Split::val;
  if (s == "test") return Split::test;
  throw Error("unknown split value '" + std::string(s) + "'");
}

std::string_view to_string(TokenMode m) { return m == TokenMode::character ? "char" : "word"; }

TokenMode parse_token_mode(std::string_view s) {
  if (s == "char") return TokenMode::character;
  if (s == "word") return TokenMode::word;
  throw Error("unknown tokenization mode '" + std::string(s) + "' (expected char or word)");
}

std::vector<std::string> Corpus::label_names() const {
  std::set<std::string> names;
  for (const auto& d : documents) names.insert(d.label);
  return {names.begin(), names.end()};
}

std::size_t Vocabulary::index_of(std::string_view term) const {
  auto it = index_.find(std::string(term));
  return it == index_.end() ? size() : it->second;
}

std::vector<std::string> tokenize(std::string_view text, TokenMode mode) {
  std::vector<std::string> tokens;
  if (mode == TokenMode::character) {
    for (char32_t cp : utf8::decode(text))
      if (!utf8::is_space(cp)) tokens.push_back(utf8::encode(cp));
    return tokens;
  }
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(' ', start);
    if (end == std::string_view::npos) end = text.size();
    if (end > start) tokens.emplace_back(text.substr(start, end - start));
    start = end + 1;
  }
  return tokens;
}

namespace {

std::string line_error(std::size_t line, const std::string& what) {
  return "corpus line " + std::to_string(line) + ": " + what;
}

const json& require_string(const json& obj, const char* key, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) throw Error(line_error(line, std::string("missing string field '") + key + "'"));
  return *it;
}

void reject_empty(const std::vector<std::string>& empty_ids, const char* stage) {
  if (empty_ids.empty()) return;
  std::string msg = std::string(stage) + " left documents without tokens:";
  for (const auto& id : empty_ids) msg += " " + id;
  throw Error(msg);
}

}  // namespace

Corpus parse_corpus(std::istream& in, TokenMode mode) {
  Corpus corpus;
  corpus.mode = mode;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(line_error(lineno, std::string("malformed JSON (") + e.what() + ")"));
    }
    if (!obj.is_object()) throw Error(line_error(lineno, "expected a JSON object"));

    Document doc;
    doc.id = require_string(obj, "id", lineno).get<std::string>();
    doc.raw_text = require_string(obj, "text", lineno).get<std::string>();
    doc.label = require_string(obj, "label", lineno).get<std::string>();
    try {
      doc.split = parse_split(require_string(obj, "split", lineno).get<std::string>());
    } catch (const Error& e) {
      throw Error(line_error(lineno, e.what()));
    }
    if (!seen.insert(doc.id).second) throw Error(line_error(lineno, "duplicate document id '" + doc.id + "'"));

    if (auto it = obj.find("tokens"); it != obj.end()) {
      if (!it->is_array()) throw Error(line_error(lineno, "'tokens' must be an array of strings"));
      for (const auto& t : *it) {
        if (!t.is_string()) throw Error(line_error(lineno, "'tokens' must be an array of strings"));
        doc.tokens.push_back(t.get<std::string>());
      }
    } else {
      try {
        doc.tokens = tokenize(doc.raw_text, mode);
      } catch (const Error& e) {
        throw Error(line_error(lineno, e.what()));
      }
    }
    corpus.documents.push_back(std::move(doc));
  }
  return corpus;
}

Corpus ingest(const std::string& path, TokenMode mode) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open corpus file '" + path + "'");
  return parse_corpus(in, mode);
}

void write_corpus(const Corpus& corpus, std::ostream& out) {
  for (const auto& d : corpus.documents) {
    // nlohmann::json sorts keys; build the line by hand to keep declared order.
    out << "{\"id\":" << json(d.id).dump() << ",\"text\":" << json(d.raw_text).dump()
        << ",\"label\":" << json(d.label).dump() << ",\"split\":" << json(std::string(to_string(d.split))).dump()
        << ",\"tokens\":" << json(d.tokens).dump() << "}\n";
  }
}

std::set<std::string> parse_stoplist(std::istream& in) {
  std::set<std::string> stop;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto b = line.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    auto e = line.find_last_not_of(" \t");
    stop.insert(line.substr(b, e - b + 1));
  }
  return stop;
}

std::set<std::string> load_stoplist(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open stoplist '" + path + "'");
  return parse_stoplist(in);
}

Corpus remove_stopwords(const Corpus& corpus, const std::set<std::string>& stoplist) {
  Corpus out = corpus;
  std::vector<std::string> emptied;
  for (auto& d : out.documents) {
    std::erase_if(d.tokens, [&](const std::string& t) { return stoplist.contains(t); });
    if (d.tokens.empty()) emptied.push_back(d.id);
  }
  reject_empty(emptied, "stopword removal");
  return out;
}

Corpus strip_special_tokens(const Corpus& corpus) {
  Corpus out = corpus;
  std::vector<std::string> emptied;
  for (auto& d : out.documents) {
    std::erase_if(d.tokens, [](const std::string& t) {
      auto cps = utf8::decode(t);
      return std::none_of(cps.begin(), cps.end(), utf8::is_word_char);
    });
    if (d.tokens.empty()) emptied.push_back(d.id);
  }
  reject_empty(emptied, "special-character filtering");
  return out;
}

Corpus ensure_validation_split(const Corpus& corpus, double fraction, std::uint64_t seed) {
  if (fraction < 0.0 || fraction >= 1.0) throw Error("validation fraction must be in [0, 1)");
  bool has_val = std::any_of(corpus.documents.begin(), corpus.documents.end(),
                             [](const Document& d) { return d.split == Split::val; });
  if (has_val) return corpus;

  std::vector<std::size_t> train;
  for (std::size_t i = 0; i < corpus.size(); ++i)
    if (corpus.documents[i].split == Split::train) train.push_back(i);
  std::size_t take = static_cast<std::size_t>(fraction * static_cast<double>(train.size()));
  if (take == 0 && fraction > 0.0 && train.size() >= 2) take = 1;

  Corpus out = corpus;
  Rng rng(seed);
  rng.shuffle(train);
  for (std::size_t k = 0; k < take; ++k) out.documents[train[k]].split = Split::val;
  return out;
}

Vocabulary build_vocabulary(const Corpus& corpus) {
  if (corpus.documents.empty()) throw Error("cannot build a vocabulary from an empty corpus");
  std::map<std::string, std::size_t> df;
  for (const auto& d : corpus.documents) {
    std::set<std::string_view> distinct(d.tokens.begin(), d.tokens.end());
    for (auto t : distinct) ++df[std::string(t)];
  }
  Vocabulary v;
  v.terms_.reserve(df.size());
  v.df_.reserve(df.size());
  for (auto& [term, count] : df) {
    v.index_.emplace(term, v.terms_.size());
    v.terms_.push_back(term);
    v.df_.push_back(count);
  }
  return v;
}

CorpusStats corpus_stats(const Corpus& corpus) {
  if (corpus.documents.empty()) throw Error("corpus_stats: empty corpus");
  CorpusStats s;
  s.documents = corpus.size();
  s.min_len = corpus.documents.front().tokens.size();
  std::size_t total = 0;
  for (const auto& d : corpus.documents) {
    std::size_t n = d.tokens.size();
    s.min_len = std::min(s.min_len, n);
    s.max_len = std::max(s.max_len, n);
    total += n;
    ++s.class_counts[d.label];
    ++s.split_counts[std::string(to_string(d.split))];
  }
  s.mean_len = static_cast<double>(total) / static_cast<double>(s.documents);
  return s;
}

std::string stats_to_json(const CorpusStats& stats) {
  json j;
  j["documents"] = stats.documents;
  j["min_len"] = stats.min_len;
  j["max_len"] = stats.max_len;
  j["mean_len"] = stats.mean_len;
  j["class_counts"] = stats.class_counts;
  j["split_counts"] = stats.split_counts;
  return j.dump(2);
}

}  // namespace textgat

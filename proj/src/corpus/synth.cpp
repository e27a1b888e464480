#include "textgat/synth.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "json.hpp"
#include "textgat/error.hpp"
#include "textgat/numcore/rng.hpp"
#include "textgat/utf8.hpp"

namespace textgat {
namespace {

constexpr char32_t kFirstIdeograph = 0x4E00;
constexpr std::size_t kAlphabetStride = 64;

std::string class_name(std::size_t c, std::size_t classes) {
  static const char* kNames[] = {"geography", "game", "car", "economy", "entertainment"};
  if (classes <= 5) return kNames[c];
  return "class" + std::to_string(c);
}

// `count` distinct two-character words over an alphabet starting at `base`.
std::vector<std::string> make_words(char32_t base, std::size_t count, Rng& rng) {
  std::size_t alphabet = 1;
  while (alphabet * alphabet < count) ++alphabet;
  if (alphabet > kAlphabetStride) throw Error("synth: vocabulary too large for one alphabet block");
  std::vector<std::string> words;
  for (std::size_t a = 0; a < alphabet; ++a)
    for (std::size_t b = 0; b < alphabet; ++b)
      words.push_back(utf8::encode(static_cast<char32_t>(base + a)) + utf8::encode(static_cast<char32_t>(base + b)));
  rng.shuffle(words);
  words.resize(count);
  return words;
}

}  // namespace

std::string synth_corpus_jsonl(const SynthOptions& o) {
  if (o.classes < 2) throw Error("synth: need at least 2 classes");
  if (o.docs_per_class == 0 || o.vocab_per_class == 0) throw Error("synth: docs and vocabulary per class must be positive");
  if (o.min_len == 0 || o.min_len > o.max_len) throw Error("synth: need 1 <= min_len <= max_len");
  if (o.overlap_rate < 0.0 || o.overlap_rate >= 1.0) throw Error("synth: overlap_rate must be in [0, 1)");
  if (o.classes + 1 > 300) throw Error("synth: too many classes");

  Rng rng(o.seed);
  std::vector<std::vector<std::string>> class_words;
  for (std::size_t c = 0; c < o.classes; ++c)
    class_words.push_back(make_words(kFirstIdeograph + static_cast<char32_t>(c * kAlphabetStride), o.vocab_per_class, rng));
  std::vector<std::string> shared;
  if (o.overlap > 0)
    shared = make_words(kFirstIdeograph + static_cast<char32_t>(o.classes * kAlphabetStride), o.overlap, rng);

  struct Row {
    std::string id, text, label, split;
  };
  std::vector<Row> rows;
  for (std::size_t c = 0; c < o.classes; ++c) {
    const std::size_t n = o.docs_per_class;
    const std::size_t n_train = n * 8 / 10;
    const std::size_t n_val = n / 10;
    std::vector<std::size_t> order(n);
    for (std::size_t k = 0; k < n; ++k) order[k] = k;
    rng.shuffle(order);
    std::vector<std::string> split(n);
    for (std::size_t k = 0; k < n; ++k) split[order[k]] = k < n_train ? "train" : (k < n_train + n_val ? "val" : "test");

    for (std::size_t k = 0; k < n; ++k) {
      std::size_t len = o.min_len + rng.below(o.max_len - o.min_len + 1);
      std::string text;
      for (std::size_t t = 0; t < len; ++t) {
        bool from_shared = !shared.empty() && rng.uniform() < o.overlap_rate;
        const auto& pool = from_shared ? shared : class_words[c];
        if (t > 0) text += ' ';
        text += pool[rng.below(pool.size())];
      }
      rows.push_back({"d" + std::to_string(c) + "_" + std::to_string(k), std::move(text), class_name(c, o.classes), split[k]});
    }
  }
  rng.shuffle(rows);

  std::ostringstream out;
  for (const auto& r : rows) {
    out << "{\"id\":" << nlohmann::json(r.id).dump() << ",\"text\":" << nlohmann::json(r.text).dump()
        << ",\"label\":" << nlohmann::json(r.label).dump() << ",\"split\":\"" << r.split << "\"}\n";
  }
  return out.str();
}

}  // namespace textgat

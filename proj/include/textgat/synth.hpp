#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace textgat {

// Desk-scale stand-in for a labeled short-text corpus. Every class owns
// `vocab_per_class` two-character words built from a class-private alphabet of
// CJK ideographs; `overlap` further words come from a shared alphabet and may
// appear in any class. Texts are space-separated words, so the same file can be
// ingested in word mode or char mode.
struct SynthOptions {
  std::size_t classes = 5;
  std::size_t docs_per_class = 200;
  std::size_t vocab_per_class = 40;
  std::size_t overlap = 20;
  // Probability that a token is drawn from the shared pool (ignored when overlap = 0).
  double overlap_rate = 0.3;
  std::size_t min_len = 8;
  std::size_t max_len = 24;
  std::uint64_t seed = 42;
};

// Corpus file contents (JSON lines, no "tokens" key). Splits are stratified
// per class: floor(0.8 n) train, floor(0.1 n) val, the remainder test.
std::string synth_corpus_jsonl(const SynthOptions& options);

}  // namespace textgat

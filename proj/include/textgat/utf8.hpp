#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace textgat::utf8 {

// Decodes UTF-8; throws Error on malformed input.
std::u32string decode(std::string_view s);
std::string encode(char32_t cp);
std::string encode(std::u32string_view s);

bool is_space(char32_t cp);
// Letters, digits and ideographs. ASCII is classified exactly; outside ASCII a
// code point counts unless it falls in a punctuation/symbol block.
bool is_word_char(char32_t cp);

}  // namespace textgat::utf8

#pragma once

#include <string>
#include <string_view>
#include <vector>

// Small ASCII-oriented string helpers. Non-ASCII bytes are left untouched and
// treated as word characters, so UTF-8 names survive tokenization intact.
namespace bechdel::text {

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);
std::string to_upper(std::string_view s);
bool has_lowercase(std::string_view s);
bool has_letter(std::string_view s);
bool iequals(std::string_view a, std::string_view b);
bool istarts_with(std::string_view s, std::string_view prefix);

// Lowercased word tokens. Apostrophes (ASCII or U+2019) inside a word are kept,
// except that possessive "'s" and trailing apostrophes are dropped.
std::vector<std::string> word_tokens(std::string_view s);

// Calls fn(token) for each token without materializing the vector; stops early
// when fn returns false.
template <typename Fn>
void for_each_token(std::string_view s, Fn&& fn);

}  // namespace bechdel::text

namespace bechdel::text {

namespace detail {
inline bool is_word_byte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}
void finish_token(std::string& tok);
}  // namespace detail

template <typename Fn>
void for_each_token(std::string_view s, Fn&& fn) {
  std::string tok;
  std::size_t i = 0;
  const std::size_t n = s.size();
  auto flush = [&]() -> bool {
    detail::finish_token(tok);
    bool keep_going = true;
    if (!tok.empty()) keep_going = fn(std::string_view(tok));
    tok.clear();
    return keep_going;
  };
  while (i < n) {
    const auto c = static_cast<unsigned char>(s[i]);
    // U+2019 RIGHT SINGLE QUOTATION MARK is read as an apostrophe.
    const bool curly = c == 0xE2 && i + 2 < n && static_cast<unsigned char>(s[i + 1]) == 0x80 &&
                       static_cast<unsigned char>(s[i + 2]) == 0x99;
    if (c == '\'' || curly) {
      if (!tok.empty()) tok.push_back('\'');
      i += curly ? 3 : 1;
      continue;
    }
    if (detail::is_word_byte(c)) {
      tok.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c));
      ++i;
      continue;
    }
    if (!flush()) return;
    ++i;
  }
  flush();
}

}  // namespace bechdel::text

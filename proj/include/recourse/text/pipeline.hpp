#pragma once

// Deterministic text pipeline feeding the toxicity scorer:
//   tokenize -> remove_stopwords -> generate_ngrams
//
// Tokens are lowercased (ASCII range) and split on Unicode whitespace and on
// ASCII punctuation. An apostrophe (U+0027 or U+2019) that sits between two
// word characters is kept as U+0027, so "don't" and "don’t" both yield the
// single token "don't". Non-ASCII characters, emoji included, are word
// characters and pass through untouched.

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace recourse::text {

using Token = std::string;
using TokenList = std::vector<Token>;
using StopList = std::unordered_set<std::string>;

struct NGram {
  std::vector<Token> tokens;
  std::string text;       // tokens joined by single spaces; WordBank key
  std::size_t position{}; // index of the first token in the content token list

  std::size_t n() const { return tokens.size(); }

  static NGram from_tokens(std::vector<Token> tokens, std::size_t position = 0);

  friend bool operator==(const NGram& a, const NGram& b) {
    return a.text == b.text && a.position == b.position;
  }
};

TokenList tokenize(std::string_view text);

TokenList remove_stopwords(const TokenList& tokens, const StopList& stoplist);

// Contiguous bi-grams followed by contiguous tri-grams, in source order. A
// single remaining token is returned as a uni-gram; no tokens gives no n-grams.
std::vector<NGram> generate_ngrams(const TokenList& tokens);

std::string join_tokens(const TokenList& tokens);

// One token per line, `#` starts a comment, blank lines ignored. Entries are
// lowercased on load. Throws Error(IoError) if the file cannot be read.
StopList load_stoplist(const std::filesystem::path& path);
StopList parse_stoplist(std::string_view contents);

bool is_valid_utf8(std::string_view bytes);

// Number of Unicode code points in a valid UTF-8 string.
std::size_t utf8_length(std::string_view bytes);

// Trims ASCII and Unicode whitespace from both ends.
std::string_view trim(std::string_view text);

}  // namespace recourse::text

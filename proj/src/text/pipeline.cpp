#include "recourse/text/pipeline.hpp"

#include <fstream>
#include <sstream>

#include "recourse/error.hpp"

namespace recourse::text {
namespace {

struct CodePoint {
  char32_t value;
  std::size_t length;  // bytes consumed
};

// Decodes one code point at `pos`. Malformed sequences decode as a single
// byte so tokenization stays total over arbitrary input.
CodePoint decode(std::string_view s, std::size_t pos) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  if (b0 < 0x80) return {b0, 1};
  std::size_t len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    return {0xFFFD, 1};
  }
  if (pos + len > s.size()) return {0xFFFD, 1};
  for (std::size_t i = 1; i < len; ++i) {
    const auto b = static_cast<unsigned char>(s[pos + i]);
    if ((b & 0xC0) != 0x80) return {0xFFFD, 1};
    cp = (cp << 6) | (b & 0x3F);
  }
  return {cp, len};
}

bool is_unicode_space(char32_t cp) {
  if (cp >= 0x09 && cp <= 0x0D) return true;
  switch (cp) {
    case 0x20:
    case 0x85:
    case 0xA0:
    case 0x1680:
    case 0x2028:
    case 0x2029:
    case 0x202F:
    case 0x205F:
    case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

bool is_ascii_punct(char32_t cp) {
  return (cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) ||
         (cp >= 0x5B && cp <= 0x60) || (cp >= 0x7B && cp <= 0x7E);
}

bool is_apostrophe(char32_t cp) { return cp == U'\'' || cp == 0x2019; }

bool is_delimiter(char32_t cp) {
  return is_unicode_space(cp) || is_ascii_punct(cp) || cp == 0x2019 ||
         (cp < 0x20) || cp == 0x7F;
}

bool is_word_char(char32_t cp) { return !is_delimiter(cp); }

}  // namespace

NGram NGram::from_tokens(std::vector<Token> tokens, std::size_t position) {
  NGram g;
  g.text = join_tokens(tokens);
  g.tokens = std::move(tokens);
  g.position = position;
  return g;
}

TokenList tokenize(std::string_view text) {
  std::vector<CodePoint> cps;
  std::vector<std::size_t> offsets;
  for (std::size_t pos = 0; pos < text.size();) {
    auto cp = decode(text, pos);
    cps.push_back(cp);
    offsets.push_back(pos);
    pos += cp.length;
  }

  TokenList tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const char32_t cp = cps[i].value;
    if (is_apostrophe(cp)) {
      const bool inner = !current.empty() && i + 1 < cps.size() &&
                         is_word_char(cps[i + 1].value);
      if (inner) {
        current.push_back('\'');
      } else {
        flush();
      }
      continue;
    }
    if (is_delimiter(cp)) {
      flush();
      continue;
    }
    if (cp < 0x80) {
      auto c = static_cast<char>(cp);
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
      current.push_back(c);
    } else {
      current.append(text.substr(offsets[i], cps[i].length));
    }
  }
  flush();
  return tokens;
}

TokenList remove_stopwords(const TokenList& tokens, const StopList& stoplist) {
  TokenList out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (!stoplist.contains(t)) out.push_back(t);
  }
  return out;
}

std::vector<NGram> generate_ngrams(const TokenList& tokens) {
  std::vector<NGram> out;
  if (tokens.empty()) return out;
  if (tokens.size() == 1) {
    out.push_back(NGram::from_tokens({tokens[0]}, 0));
    return out;
  }
  for (std::size_t n : {std::size_t{2}, std::size_t{3}}) {
    if (tokens.size() < n) continue;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
      out.push_back(NGram::from_tokens(
          TokenList(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                    tokens.begin() + static_cast<std::ptrdiff_t>(i + n)),
          i));
    }
  }
  return out;
}

std::string join_tokens(const TokenList& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

StopList parse_stoplist(std::string_view contents) {
  StopList list;
  std::istringstream in{std::string(contents)};
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto word = trim(line);
    if (word.empty()) continue;
    std::string lowered(word);
    for (auto& c : lowered) {
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    list.insert(std::move(lowered));
  }
  return list;
}

StopList load_stoplist(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::IoError, "cannot open stop-word list '" + path.string() + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_stoplist(buf.str());
}

bool is_valid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    std::size_t len;
    char32_t min;
    if (b0 < 0x80) {
      ++i;
      continue;
    } else if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      min = 0x80;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      min = 0x800;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      min = 0x10000;
    } else {
      return false;
    }
    if (i + len > s.size()) return false;
    auto cp = decode(s, i);
    if (cp.length != len) return false;
    if (cp.value < min || cp.value > 0x10FFFF) return false;
    if (cp.value >= 0xD800 && cp.value <= 0xDFFF) return false;
    i += len;
  }
  return true;
}

std::size_t utf8_length(std::string_view s) {
  std::size_t n = 0;
  for (std::size_t pos = 0; pos < s.size(); ++n) pos += decode(s, pos).length;
  return n;
}

std::string_view trim(std::string_view text) {
  std::size_t begin = 0;
  while (begin < text.size()) {
    auto cp = decode(text, begin);
    if (!is_unicode_space(cp.value)) break;
    begin += cp.length;
  }
  std::size_t end = begin;
  for (std::size_t pos = begin; pos < text.size();) {
    auto cp = decode(text, pos);
    pos += cp.length;
    if (!is_unicode_space(cp.value)) end = pos;
  }
  return text.substr(begin, end - begin);
}

}  // namespace recourse::text

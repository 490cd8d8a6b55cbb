#include "recourse/scoring/lexicon.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "recourse/error.hpp"
#include "recourse/text/pipeline.hpp"

namespace recourse::scoring {
namespace {

constexpr std::size_t kMaxPhraseTokens = 3;

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string_view::npos ? tab : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& what) {
  throw Error(ErrorCode::ParseError, "lexicon line " + std::to_string(line_no) + ": " + what);
}

}  // namespace

std::vector<LexiconEntry> parse_lexicon(std::string_view contents) {
  std::vector<LexiconEntry> entries;
  std::unordered_set<std::string> seen;
  std::istringstream in{std::string(contents)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty() || text::trim(line).front() == '#') continue;

    auto cols = split_tabs(line);
    if (cols.size() != 1 + kCategoryCount) {
      parse_fail(line_no, "expected " + std::to_string(1 + kCategoryCount) + " columns, got " +
                              std::to_string(cols.size()));
    }
    if (!text::is_valid_utf8(cols[0])) parse_fail(line_no, "phrase is not valid UTF-8");

    auto tokens = text::tokenize(cols[0]);
    if (tokens.empty() || tokens.size() > kMaxPhraseTokens) {
      parse_fail(line_no, "phrase must have 1-3 tokens");
    }
    LexiconEntry entry;
    entry.phrase = text::join_tokens(tokens);
    if (entry.phrase != text::trim(cols[0])) {
      parse_fail(line_no, "phrase '" + std::string(cols[0]) + "' is not in canonical form '" +
                              entry.phrase + "'");
    }
    for (std::size_t i = 0; i < kCategoryCount; ++i) {
      auto field = text::trim(cols[i + 1]);
      double value = 0.0;
      auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
      if (ec != std::errc{} || ptr != field.data() + field.size()) {
        parse_fail(line_no, "bad number '" + std::string(field) + "'");
      }
      if (!(value >= 0.0 && value <= 1.0)) {
        parse_fail(line_no, "score " + std::string(field) + " outside [0,1]");
      }
      entry.scores.set(kAllCategories[i], value);
    }
    if (!seen.insert(entry.phrase).second) {
      throw Error(ErrorCode::DuplicatePhrase, "lexicon line " + std::to_string(line_no) +
                                                  ": duplicate phrase '" + entry.phrase + "'");
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

std::vector<LexiconEntry> load_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open lexicon '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_lexicon(buf.str());
}

LexiconScorer::LexiconScorer(const std::vector<LexiconEntry>& entries) {
  for (const auto& e : entries) {
    if (!by_phrase_.emplace(e.phrase, e.scores).second) {
      throw Error(ErrorCode::DuplicatePhrase, "duplicate phrase '" + e.phrase + "'");
    }
  }
}

CategoryScores LexiconScorer::score(std::string_view text) const {
  require_scorable(text);
  const auto tokens = text::tokenize(text);
  CategoryScores result;
  std::string key;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    key.clear();
    for (std::size_t n = 1; n <= kMaxPhraseTokens && i + n <= tokens.size(); ++n) {
      if (n > 1) key.push_back(' ');
      key += tokens[i + n - 1];
      if (auto it = by_phrase_.find(key); it != by_phrase_.end()) {
        result.absorb_max(it->second);
      }
    }
  }
  return result;
}

}  // namespace recourse::scoring

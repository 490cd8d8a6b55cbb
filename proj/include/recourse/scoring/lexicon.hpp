#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "recourse/scoring/scorer.hpp"

namespace recourse::scoring {

struct LexiconEntry {
  std::string phrase;  // canonical form: 1-3 lowercase tokens joined by spaces
  CategoryScores scores;
};

// Lexicon file: UTF-8, tab separated, `#` comment lines, columns
//   phrase  toxicity  severe_toxicity  identity_attack  insult  profanity  threat
// Throws Error(ParseError) naming the offending line, Error(DuplicatePhrase)
// when a canonical phrase appears twice, Error(IoError) if unreadable.
std::vector<LexiconEntry> load_lexicon(const std::filesystem::path& path);
std::vector<LexiconEntry> parse_lexicon(std::string_view contents);

// Deterministic offline scorer. For each category the score of a text is the
// maximum over lexicon entries whose token sequence occurs contiguously in
// tokenize(text), or 0 when nothing matches.
class LexiconScorer final : public Scorer {
 public:
  explicit LexiconScorer(const std::vector<LexiconEntry>& entries);

  CategoryScores score(std::string_view text) const override;

  std::size_t size() const { return by_phrase_.size(); }

 private:
  std::unordered_map<std::string, CategoryScores> by_phrase_;
};

}  // namespace recourse::scoring

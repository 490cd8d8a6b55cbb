#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace recourse::study {

inline constexpr std::size_t kSusItems = 10;

// Standard SUS scoring of ten 1-5 ratings: odd items contribute (r - 1),
// even items (5 - r), and the sum is scaled by 2.5 onto [0, 100].
// Throws Error(WrongArity) or Error(OutOfRange).
double sus_score(std::span<const int> items);

struct SusBand {
  double lower_bound;
  std::string label;
};

// Score bands loaded from a TSV table (lower_bound<TAB>label, `#` comments).
// A score falls in the band with the greatest lower bound <= score.
class SusBands {
 public:
  // Throws Error(ParseError) unless bounds are strictly increasing from 0.
  static SusBands parse(std::string_view tsv);
  static SusBands load(const std::filesystem::path& path);

  // Throws Error(OutOfRange) outside [0, 100].
  const std::string& classify(double score) const;

  const std::vector<SusBand>& bands() const { return bands_; }

 private:
  std::vector<SusBand> bands_;
};

}  // namespace recourse::study

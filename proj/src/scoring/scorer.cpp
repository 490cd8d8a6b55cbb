#include "recourse/scoring/scorer.hpp"

#include <set>

#include "recourse/error.hpp"
#include "recourse/text/pipeline.hpp"

namespace recourse::scoring {

std::vector<CategoryScores> Scorer::score_batch(std::span<const std::string> texts) const {
  std::vector<CategoryScores> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(score(t));
  return out;
}

void require_scorable(std::string_view text) {
  if (text::trim(text).empty()) {
    throw Error(ErrorCode::InvalidInput, "cannot score empty text");
  }
}

CategoryScores CachingScorer::score(const std::string& text) {
  if (auto it = cache_.find(text); it != cache_.end()) return it->second;
  ++misses_;
  auto s = inner_->score(text);
  cache_.emplace(text, s);
  return s;
}

std::vector<CategoryScores> CachingScorer::score_batch(std::span<const std::string> texts) {
  // Unscored texts, deduplicated, in first-seen order.
  std::vector<std::string> unique;
  std::set<std::string_view> seen;
  for (const auto& t : texts) {
    if (!cache_.contains(t) && seen.insert(t).second) unique.push_back(t);
  }
  if (!unique.empty()) {
    auto fresh = inner_->score_batch(unique);
    misses_ += unique.size();
    for (std::size_t i = 0; i < unique.size(); ++i) cache_.emplace(unique[i], fresh[i]);
  }
  std::vector<CategoryScores> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(cache_.find(t)->second);
  return out;
}

}  // namespace recourse::scoring

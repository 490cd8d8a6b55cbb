#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "recourse/scoring/categories.hpp"

namespace recourse::scoring {

// Uniform scoring interface. Implementations are immutable after construction
// and may be called from many sessions at once.
//
// score() throws Error(InvalidInput) for text that is empty after trimming and
// Error(RemoteUnavailable) when the backing service cannot be reached.
class Scorer {
 public:
  virtual ~Scorer() = default;

  virtual CategoryScores score(std::string_view text) const = 0;

  // One result per input, in input order. Any failure fails the whole batch.
  virtual std::vector<CategoryScores> score_batch(std::span<const std::string> texts) const;
};

// Per-session memo of text -> scores. Single-writer: owned by one session.
// Failures are not cached so a transient outage does not stick.
class CachingScorer {
 public:
  explicit CachingScorer(std::shared_ptr<const Scorer> inner) : inner_(std::move(inner)) {}

  CategoryScores score(const std::string& text);
  std::vector<CategoryScores> score_batch(std::span<const std::string> texts);

  std::size_t size() const { return cache_.size(); }
  std::size_t misses() const { return misses_; }

 private:
  std::shared_ptr<const Scorer> inner_;
  std::map<std::string, CategoryScores, std::less<>> cache_;
  std::size_t misses_ = 0;
};

// Throws Error(InvalidInput) if `text` is empty after trimming.
void require_scorable(std::string_view text);

}  // namespace recourse::scoring

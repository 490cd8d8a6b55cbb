#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"

namespace recourse::filter {

enum class WordStatus { None, Approved, Blocked, Deferred };

std::string_view to_string(WordStatus s);
std::optional<WordStatus> word_status_from_string(std::string_view s);

struct WordBankEntry {
  WordStatus status = WordStatus::None;
  std::int64_t ts_us = 0;    // when the status was set
  std::uint64_t turn = 0;    // turn whose prompt produced it

  friend bool operator==(const WordBankEntry&, const WordBankEntry&) = default;
};

// Per-session registry of user verdicts on n-grams, keyed by canonical text.
// Approved and Blocked are terminal; None and Deferred may move to any of
// Approved, Blocked or Deferred.
class WordBank {
 public:
  WordStatus status(std::string_view ngram) const;
  const WordBankEntry* find(std::string_view ngram) const;

  static bool can_transition(WordStatus from, WordStatus to);

  // Throws Error(IllegalTransition) if the move is not permitted.
  void set(const std::string& ngram, WordStatus to, std::int64_t ts_us, std::uint64_t turn);

  const std::map<std::string, WordBankEntry, std::less<>>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

  friend bool operator==(const WordBank&, const WordBank&) = default;

 private:
  std::map<std::string, WordBankEntry, std::less<>> entries_;
};

nlohmann::json to_json(const WordBank& wb);

}  // namespace recourse::filter

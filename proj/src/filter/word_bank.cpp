#include "recourse/filter/word_bank.hpp"

#include <string>

#include "recourse/error.hpp"

namespace recourse::filter {

std::string_view to_string(WordStatus s) {
  switch (s) {
    case WordStatus::None: return "none";
    case WordStatus::Approved: return "approved";
    case WordStatus::Blocked: return "blocked";
    case WordStatus::Deferred: return "deferred";
  }
  return "none";
}

std::optional<WordStatus> word_status_from_string(std::string_view s) {
  for (auto st : {WordStatus::None, WordStatus::Approved, WordStatus::Blocked, WordStatus::Deferred}) {
    if (to_string(st) == s) return st;
  }
  return std::nullopt;
}

WordStatus WordBank::status(std::string_view ngram) const {
  auto it = entries_.find(ngram);
  return it == entries_.end() ? WordStatus::None : it->second.status;
}

const WordBankEntry* WordBank::find(std::string_view ngram) const {
  auto it = entries_.find(ngram);
  return it == entries_.end() ? nullptr : &it->second;
}

bool WordBank::can_transition(WordStatus from, WordStatus to) {
  if (to == WordStatus::None) return false;
  return from == WordStatus::None || from == WordStatus::Deferred;
}

void WordBank::set(const std::string& ngram, WordStatus to, std::int64_t ts_us, std::uint64_t turn) {
  const auto from = status(ngram);
  if (!can_transition(from, to)) {
    throw Error(ErrorCode::IllegalTransition, "'" + ngram + "' cannot move from " +
                                                  std::string(to_string(from)) + " to " +
                                                  std::string(to_string(to)));
  }
  entries_[ngram] = WordBankEntry{to, ts_us, turn};
}

nlohmann::json to_json(const WordBank& wb) {
  auto arr = nlohmann::json::array();
  for (const auto& [ngram, e] : wb.entries()) {
    arr.push_back({{"ngram", ngram},
                   {"status", std::string(to_string(e.status))},
                   {"ts", e.ts_us},
                   {"turn", e.turn}});
  }
  return arr;
}

}  // namespace recourse::filter

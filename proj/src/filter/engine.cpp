#include "recourse/filter/engine.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "recourse/error.hpp"

namespace recourse::filter {

bool Thresholds::valid() const {
  if (std::isnan(h_star) || std::isnan(h_max)) return false;
  return 0.0 <= h_star && h_star <= h_max && h_max <= 1.0;
}

void Thresholds::validate() const {
  if (!valid()) {
    throw Error(ErrorCode::InvalidConfig, "thresholds must satisfy 0 <= h_star <= h_max <= 1 (got h_star=" +
                                              std::to_string(h_star) + ", h_max=" + std::to_string(h_max) + ")");
  }
}

scoring::CategoryScores ScoredResponse::governing_scores() const {
  if (const auto* f = flagged_span()) return f->scores;
  if (whole_text) return *whole_text;
  return {};
}

bool more_toxic(const ScoredSpan& a, const ScoredSpan& b) {
  if (a.overall() != b.overall()) return a.overall() > b.overall();
  if (a.ngram.position != b.ngram.position) return a.ngram.position < b.ngram.position;
  if (a.ngram.n() != b.ngram.n()) return a.ngram.n() < b.ngram.n();
  return a.ngram.text < b.ngram.text;
}

void settle(ScoredResponse& sr) {
  sr.flagged.reset();
  sr.h_prime = 0.0;
  for (std::size_t i = 0; i < sr.spans.size(); ++i) {
    if (!sr.flagged || more_toxic(sr.spans[i], sr.spans[*sr.flagged])) sr.flagged = i;
  }
  if (sr.flagged) {
    sr.h_prime = sr.spans[*sr.flagged].overall();
  } else if (sr.whole_text) {
    sr.h_prime = sr.whole_text->overall();
  }
}

ScoredResponse score_response(std::string response_text, const text::StopList& stoplist,
                              const WordBank& wb, const BatchScoreFn& score) {
  ScoredResponse sr;
  sr.response_text = std::move(response_text);
  const auto content = text::remove_stopwords(text::tokenize(sr.response_text), stoplist);
  if (content.empty()) {
    const std::string whole(text::trim(sr.response_text));
    sr.whole_text = score(std::span<const std::string>(&whole, 1)).at(0);
    settle(sr);
    return sr;
  }

  std::vector<text::NGram> kept;
  for (auto& g : text::generate_ngrams(content)) {
    if (wb.status(g.text) == WordStatus::Approved) {
      sr.excluded_approved.push_back(g.text);
    } else {
      kept.push_back(std::move(g));
    }
  }
  std::vector<std::string> texts;
  texts.reserve(kept.size());
  for (const auto& g : kept) texts.push_back(g.text);
  const auto scores = texts.empty() ? std::vector<scoring::CategoryScores>{} : score(texts);
  for (std::size_t i = 0; i < kept.size(); ++i) {
    sr.spans.push_back({std::move(kept[i]), scores.at(i)});
  }
  settle(sr);
  return sr;
}

std::string_view to_string(FilterKind k) {
  switch (k) {
    case FilterKind::Show: return "show";
    case FilterKind::Block: return "block";
    case FilterKind::Prompt: return "prompt";
  }
  return "";
}

std::string_view to_string(BlockReason r) {
  switch (r) {
    case BlockReason::None: return "none";
    case BlockReason::Threshold: return "threshold";
    case BlockReason::HardMax: return "hard_max";
    case BlockReason::WordBankBlocked: return "word_bank_blocked";
  }
  return "";
}

FilterDecision fixed_filter(double h_prime, const Thresholds& t) {
  FilterDecision d;
  if (h_prime >= t.h_star) {
    d.kind = FilterKind::Block;
    d.reason = BlockReason::Threshold;
  }
  return d;
}

FilterDecision dynamic_filter(const ScoredResponse& sr, const Thresholds& t, const WordBank& wb) {
  FilterDecision d;
  for (const auto& s : sr.spans) {
    if (wb.status(s.ngram.text) == WordStatus::Blocked) d.blocked_hits.push_back(s.ngram.text);
  }
  if (!d.blocked_hits.empty()) {
    d.kind = FilterKind::Block;
    d.reason = BlockReason::WordBankBlocked;
    return d;
  }
  if (sr.h_prime < t.h_star) return d;
  if (sr.h_prime >= t.h_max) {
    d.kind = FilterKind::Block;
    d.reason = BlockReason::HardMax;
    return d;
  }

  d.kind = FilterKind::Prompt;
  PromptPreview preview;
  for (const auto& s : sr.spans) {
    if (s.overall() >= t.h_star) preview.flagged.push_back(s);
  }
  std::sort(preview.flagged.begin(), preview.flagged.end(), more_toxic);
  // A repeated n-gram is flagged once, at its most toxic occurrence.
  std::set<std::string> seen;
  std::erase_if(preview.flagged, [&seen](const ScoredSpan& s) { return !seen.insert(s.ngram.text).second; });
  for (std::size_t i = 0; i < preview.flagged.size() && i < 2; ++i) {
    preview.named.push_back(preview.flagged[i].ngram.text);
  }
  preview.categories = scoring::top_categories(sr.governing_scores(), 3);
  d.prompt = std::move(preview);
  return d;
}

std::string_view to_string(ViewChoice v) { return v == ViewChoice::View ? "view" : "decline"; }

std::string_view to_string(FutureChoice f) {
  switch (f) {
    case FutureChoice::Approve: return "approve";
    case FutureChoice::Defer: return "defer";
    case FutureChoice::Block: return "block";
  }
  return "";
}

std::optional<ViewChoice> view_choice_from_string(std::string_view s) {
  if (s == "view") return ViewChoice::View;
  if (s == "decline") return ViewChoice::Decline;
  return std::nullopt;
}

std::optional<FutureChoice> future_choice_from_string(std::string_view s) {
  for (auto f : {FutureChoice::Approve, FutureChoice::Defer, FutureChoice::Block}) {
    if (to_string(f) == s) return f;
  }
  return std::nullopt;
}

void UserDecision::validate() const {
  if (a1 == ViewChoice::View && !a2) {
    throw Error(ErrorCode::InvalidInput, "a2 is required when a1=view");
  }
  if (a1 == ViewChoice::Decline && a2) {
    throw Error(ErrorCode::InvalidInput, "a2 must be absent when a1=decline");
  }
}

Resolution apply_decision(WordBank& wb, const UserDecision& d, std::span<const std::string> flagged,
                          std::int64_t ts_us, std::uint64_t turn) {
  d.validate();
  WordStatus target = WordStatus::Blocked;
  if (d.a1 == ViewChoice::View) {
    switch (*d.a2) {
      case FutureChoice::Approve: target = WordStatus::Approved; break;
      case FutureChoice::Defer: target = WordStatus::Deferred; break;
      case FutureChoice::Block: target = WordStatus::Blocked; break;
    }
  }
  for (const auto& g : flagged) {
    if (!WordBank::can_transition(wb.status(g), target)) {
      throw Error(ErrorCode::IllegalTransition,
                  "'" + g + "' is already " + std::string(to_string(wb.status(g))));
    }
  }
  for (const auto& g : flagged) {
    if (wb.status(g) != target || target == WordStatus::Deferred) wb.set(g, target, ts_us, turn);
  }
  return d.a1 == ViewChoice::View ? Resolution::Revealed : Resolution::Withheld;
}

const OpenPrompt& PromptRegistry::open(std::uint64_t turn, std::vector<std::string> flagged) {
  if (current_) {
    throw Error(ErrorCode::PromptPending, "prompt " + current_->id + " is still open");
  }
  OpenPrompt p{"p" + std::to_string(next_++), turn, std::move(flagged)};
  states_[p.id] = PromptState::Open;
  current_ = std::move(p);
  return *current_;
}

const OpenPrompt& PromptRegistry::require_open(std::string_view id) const {
  auto it = states_.find(id);
  if (it == states_.end()) {
    throw Error(ErrorCode::UnknownPrompt, "no prompt with id '" + std::string(id) + "'");
  }
  if (it->second != PromptState::Open) {
    throw Error(ErrorCode::PromptAlreadyResolved, "prompt '" + std::string(id) + "' is no longer open");
  }
  return *current_;
}

OpenPrompt PromptRegistry::resolve(std::string_view id) {
  require_open(id);
  states_[current_->id] = PromptState::Resolved;
  auto p = std::move(*current_);
  current_.reset();
  return p;
}

std::optional<OpenPrompt> PromptRegistry::expire() {
  if (!current_) return std::nullopt;
  states_[current_->id] = PromptState::Expired;
  auto p = std::move(*current_);
  current_.reset();
  return p;
}

std::optional<PromptState> PromptRegistry::state(std::string_view id) const {
  auto it = states_.find(id);
  if (it == states_.end()) return std::nullopt;
  return it->second;
}

}  // namespace recourse::filter

#pragma once

// Gating logic for model responses.
//
// A response's score h' is the highest `toxicity` value among its content
// n-grams. Two thresholds split the score range:
//
//   h' <  h_star           show the response
//   h_star <= h' < h_max   dynamic condition: ask the user (recourse prompt)
//   h' >= h_max            block, serve the default message
//
// The fixed condition has no middle band: it blocks whenever h' >= h_star.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "recourse/filter/word_bank.hpp"
#include "recourse/scoring/categories.hpp"
#include "recourse/text/pipeline.hpp"

namespace recourse::filter {

struct Thresholds {
  double h_star = 0.35;
  double h_max = 0.70;

  // 0 <= h_star <= h_max <= 1, no NaN.
  bool valid() const;
  // Throws Error(InvalidConfig) unless valid().
  void validate() const;

  friend bool operator==(const Thresholds&, const Thresholds&) = default;
};

struct ScoredSpan {
  text::NGram ngram;
  scoring::CategoryScores scores;

  double overall() const { return scores.overall(); }
};

struct ScoredResponse {
  std::string response_text;
  std::vector<ScoredSpan> spans;               // approved n-grams excluded
  std::vector<std::string> excluded_approved;  // what was skipped, for the log
  std::optional<std::size_t> flagged;          // index into spans
  // Set when no content tokens remain and the whole text was scored instead.
  std::optional<scoring::CategoryScores> whole_text;
  double h_prime = 0.0;

  const ScoredSpan* flagged_span() const { return flagged ? &spans[*flagged] : nullptr; }
  // Scores backing h': the flagged span, the whole text, or all zeros.
  scoring::CategoryScores governing_scores() const;
};

// Span ordering used for flagging: higher overall score first, then earlier
// position, then shorter n, then lexicographic text.
bool more_toxic(const ScoredSpan& a, const ScoredSpan& b);

// Fills `flagged` and `h_prime` from `spans` / `whole_text`.
void settle(ScoredResponse& sr);

using BatchScoreFn = std::function<std::vector<scoring::CategoryScores>(std::span<const std::string>)>;

// tokenize -> drop stop-words -> n-grams -> drop approved -> score. With no
// content tokens left the whole response is scored as one span-less unit.
// If every n-gram is approved, nothing is scored and h' is 0.
ScoredResponse score_response(std::string response_text, const text::StopList& stoplist,
                              const WordBank& wb, const BatchScoreFn& score);

enum class FilterKind { Show, Block, Prompt };
enum class BlockReason { None, Threshold, HardMax, WordBankBlocked };

std::string_view to_string(FilterKind k);
std::string_view to_string(BlockReason r);

struct PromptPreview {
  std::vector<ScoredSpan> flagged;                   // every span in the prompt band, most toxic first
  std::vector<std::string> named;                    // the one or two n-grams named to the user
  std::vector<scoring::RankedCategory> categories;   // top three of the most toxic span
};

struct FilterDecision {
  FilterKind kind = FilterKind::Show;
  BlockReason reason = BlockReason::None;
  std::optional<PromptPreview> prompt;
  std::vector<std::string> blocked_hits;  // word-bank blocked n-grams present
};

FilterDecision fixed_filter(double h_prime, const Thresholds& t);

// Precondition: `sr` was built against `wb` (approved n-grams excluded).
FilterDecision dynamic_filter(const ScoredResponse& sr, const Thresholds& t, const WordBank& wb);

enum class ViewChoice { View, Decline };
enum class FutureChoice { Approve, Defer, Block };

std::string_view to_string(ViewChoice v);
std::string_view to_string(FutureChoice f);
std::optional<ViewChoice> view_choice_from_string(std::string_view s);
std::optional<FutureChoice> future_choice_from_string(std::string_view s);

struct UserDecision {
  std::string prompt_id;
  ViewChoice a1 = ViewChoice::View;
  std::optional<FutureChoice> a2;

  // a2 is required after View and forbidden after Decline.
  // Throws Error(InvalidInput) otherwise.
  void validate() const;
};

enum class Resolution { Revealed, Withheld };

// Applies a verdict to every flagged n-gram atomically: either all move or
// none do (Error(IllegalTransition)).
//   decline        -> blocked,  response withheld
//   view + approve -> approved, response shown
//   view + block   -> blocked,  response shown this once
//   view + defer   -> deferred, response shown
Resolution apply_decision(WordBank& wb, const UserDecision& d, std::span<const std::string> flagged,
                          std::int64_t ts_us, std::uint64_t turn);

struct OpenPrompt {
  std::string id;
  std::uint64_t turn = 0;
  std::vector<std::string> flagged;
};

enum class PromptState { Open, Resolved, Expired };

// Issues prompt ids ("p1", "p2", ...) and tracks their lifecycle. At most one
// prompt is open at a time.
class PromptRegistry {
 public:
  const OpenPrompt& open(std::uint64_t turn, std::vector<std::string> flagged);

  const OpenPrompt* current() const { return current_ ? &*current_ : nullptr; }

  // Throws Error(UnknownPrompt) for ids never issued and
  // Error(PromptAlreadyResolved) for resolved or expired ones.
  const OpenPrompt& require_open(std::string_view id) const;

  // Marks the open prompt resolved and returns it.
  OpenPrompt resolve(std::string_view id);
  // Marks the open prompt (if any) expired and returns it.
  std::optional<OpenPrompt> expire();

  std::optional<PromptState> state(std::string_view id) const;

 private:
  std::uint64_t next_ = 1;
  std::optional<OpenPrompt> current_;
  std::map<std::string, PromptState, std::less<>> states_;
};

}  // namespace recourse::filter

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "recourse/filter/engine.hpp"
#include "recourse/model/gateway.hpp"
#include "recourse/scoring/scorer.hpp"
#include "recourse/session/clock.hpp"
#include "recourse/session/record.hpp"
#include "recourse/session/store.hpp"

namespace recourse::session {

enum class OutcomeKind { Shown, DefaultMessage, RecoursePrompt, Error };

std::string_view to_string(OutcomeKind k);

// What the client is told about an open prompt. Never carries the withheld
// response text.
struct PromptPayload {
  std::string prompt_id;
  std::vector<std::string> named;      // one or two most toxic n-grams
  std::vector<std::string> flagged;    // every n-gram the decision applies to
  std::vector<scoring::RankedCategory> categories;
  std::string question;                // viewing question (a1)
  std::string followup;                // future-filtering question (a2)
};

// Client-facing result of a message or decision. Carries no field naming the
// study condition.
struct TurnOutcome {
  OutcomeKind kind = OutcomeKind::Shown;
  std::uint64_t turn = 0;
  std::string text;  // shown text, default message, or error description
  std::optional<PromptPayload> prompt;
  std::string error_code;
};

nlohmann::json to_json(const TurnOutcome& o);

std::string viewing_question(const SessionConfig& cfg, const std::vector<std::string>& named,
                             const std::vector<scoring::RankedCategory>& categories);
std::string filtering_question(const SessionConfig& cfg);

struct SessionDeps {
  std::shared_ptr<const scoring::Scorer> scorer;
  std::shared_ptr<model::ChatModel> model;
  std::shared_ptr<const text::StopList> stoplist;
  std::shared_ptr<Clock> clock;
  std::shared_ptr<EventSink> sink;  // may be null: in-memory only
};

// One conversation. Not internally synchronized: callers serialize all calls
// on a session (SessionService does this with a per-session mutex).
class Session {
 public:
  using Listener = std::function<void(const TurnOutcome&)>;

  // Throws Error(InvalidConfig) for invalid configuration or missing deps.
  Session(std::string id, SessionConfig config, SessionDeps deps);

  // Errors: InvalidInput (empty or non-UTF-8 text), SessionClosed,
  // PromptPending, ModelUnavailable / ScriptExhausted from the model.
  // Scorer failures never surface: the turn is served the default message.
  TurnOutcome post_user_message(const std::string& text);

  // Errors: InvalidInput (malformed a1/a2), SessionClosed, UnknownPrompt
  // (never issued or already resolved), IllegalTransition.
  TurnOutcome post_decision(const filter::UserDecision& decision);

  // Expires any open prompt and appends session_end. Idempotent.
  void close();
  // Closes if the time limit has passed. Returns closed().
  bool expire_if_due();

  bool closed() const { return closed_; }
  const std::string& id() const { return record_.session_id; }
  const SessionConfig& config() const { return record_.config; }
  const SessionRecord& record() const { return record_; }
  const filter::WordBank& word_bank() const { return word_bank_; }
  std::optional<PromptPayload> open_prompt() const { return open_payload_; }
  std::uint64_t turn() const { return turn_; }

  int subscribe(Listener listener);
  void unsubscribe(int token);

 private:
  void emit(EventKind kind, nlohmann::json payload, std::optional<std::int64_t> ts = std::nullopt);
  TurnOutcome publish(TurnOutcome outcome);
  void close_at(std::int64_t ts);
  bool due(std::int64_t ts) const;
  TurnOutcome serve_default(std::uint64_t turn, std::string_view filter, std::string_view reason);

  SessionDeps deps_;
  SessionRecord record_;
  scoring::CachingScorer cache_;
  filter::WordBank word_bank_;
  filter::PromptRegistry prompts_;
  std::optional<PromptPayload> open_payload_;
  std::string withheld_text_;
  std::vector<model::ChatTurn> history_;
  std::uint64_t turn_ = 0;
  std::int64_t last_ts_ = 0;
  bool closed_ = false;
  std::map<int, Listener> listeners_;
  int next_listener_ = 1;
};

}  // namespace recourse::session

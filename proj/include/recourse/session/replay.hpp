#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "recourse/filter/engine.hpp"
#include "recourse/model/gateway.hpp"
#include "recourse/scoring/scorer.hpp"
#include "recourse/session/record.hpp"

namespace recourse::session {

// Scorer answering from the scores events of a recorded session. Turns whose
// scoring failed in the recording fail again when replayed.
class RecordedScorer final : public scoring::Scorer {
 public:
  explicit RecordedScorer(const SessionRecord& record);

  scoring::CategoryScores score(std::string_view text) const override;

  // The replay driver announces the turn being scored.
  void set_turn(std::uint64_t turn) const { turn_ = turn; }

 private:
  std::map<std::string, scoring::CategoryScores, std::less<>> scores_;
  std::map<std::uint64_t, std::string> failed_turns_;  // turn -> recorded error
  mutable std::uint64_t turn_ = 0;
};

// Re-runs a recorded session with its own inputs: user messages, decisions,
// raw model outputs (as a script) and recorded scores. Timestamps are played
// back from the record, so a deterministic pipeline reproduces the record
// byte for byte.
SessionRecord replay(const SessionRecord& record, const text::StopList& stoplist);

// Scripted user behaviour. A Decision step resolves the open prompt; with no
// open prompt it is skipped. When a message arrives while a prompt is open,
// `auto_decision` resolves it first (or replay fails with PromptPending).
struct DecisionScript {
  struct Message {
    std::string text;
  };
  struct Decide {
    filter::ViewChoice a1 = filter::ViewChoice::View;
    std::optional<filter::FutureChoice> a2;
  };
  std::vector<std::variant<Message, Decide>> steps;
  std::optional<Decide> auto_decision;
};

// JSONL, one object per line:
//   {"user": "text"}                        send a message
//   {"a1": "view", "a2": "approve"}         resolve the open prompt
//   {"auto": {"a1": "view", "a2": "approve"}}  default verdict for prompts
//                                           left open by the script
DecisionScript parse_decision_script(std::string_view jsonl);
DecisionScript load_decision_script(const std::filesystem::path& path);

struct ScriptReplayOptions {
  std::string session_id = "replay";
  std::int64_t start_ts_us = 0;
  std::int64_t tick_us = 1000;
};

// Runs a fresh in-memory session over the script with a scripted model.
// Errors: ScriptExhausted when the model script runs out, PromptPending when
// a prompt is open with no decision available.
SessionRecord replay_script(const SessionConfig& config, const DecisionScript& script,
                            const model::ScriptedTranscript& transcript,
                            std::shared_ptr<const scoring::Scorer> scorer,
                            std::shared_ptr<const text::StopList> stoplist,
                            const ScriptReplayOptions& options = {});

}  // namespace recourse::session

#pragma once

// Session event log.
//
// A session persists as JSONL: one `session_start` header line holding the
// session id and config, then one line per event. Every line is a JSON object
// {ts, kind, payload} serialized with sorted keys, so a record has exactly one
// canonical byte form.
//
// Event payloads (all carry `turn` except session_start / session_end):
//   user_msg           {turn, text}
//   model_raw          {turn, text}                     pre-filter output, always kept
//   scores             {turn, spans:[{ngram,position,n,scores}], excluded_approved,
//                       h_prime, flagged?, whole_text?}   or {turn, error}
//   decision_required  {turn, prompt_id, flagged, named, categories, question, followup}
//   user_decision      {turn, prompt_id, a1, a2?, updates:[{ngram,status}]}
//   outcome            {turn, kind: shown|default_message|error|expired, filter?, reason?,
//                       text?, prompt_id?, code?}
//   session_end        {word_bank}

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "recourse/filter/word_bank.hpp"
#include "recourse/session/config.hpp"

namespace recourse::session {

enum class EventKind {
  SessionStart,
  UserMsg,
  ModelRaw,
  Scores,
  DecisionRequired,
  UserDecision,
  Outcome,
  SessionEnd,
};

std::string_view to_string(EventKind k);
std::optional<EventKind> event_kind_from_string(std::string_view s);

struct Event {
  std::int64_t ts_us = 0;
  EventKind kind = EventKind::UserMsg;
  nlohmann::json payload = nlohmann::json::object();

  friend bool operator==(const Event&, const Event&) = default;
};

struct SessionRecord {
  std::string session_id;
  SessionConfig config;
  std::int64_t created_ts_us = 0;
  std::vector<Event> events;  // excludes the session_start header

  Event header() const;
  bool ended() const { return !events.empty() && events.back().kind == EventKind::SessionEnd; }

  friend bool operator==(const SessionRecord&, const SessionRecord&) = default;
};

// Word bank rebuilt from the `updates` of user_decision events.
filter::WordBank word_bank_of(const SessionRecord& record);

std::string serialize_event(const Event& e);  // one line, no trailing newline
Event parse_event(std::string_view line);     // throws Error(ParseError)

// Header plus events, each line '\n'-terminated.
std::string serialize_record(const SessionRecord& record);
// Throws Error(ParseError) for malformed lines or a missing header.
SessionRecord parse_record(std::string_view jsonl);

}  // namespace recourse::session

#include "recourse/session/record.hpp"

#include <sstream>

#include "recourse/error.hpp"
#include "recourse/text/pipeline.hpp"

namespace recourse::session {
namespace {

constexpr std::pair<EventKind, std::string_view> kKindNames[] = {
    {EventKind::SessionStart, "session_start"},
    {EventKind::UserMsg, "user_msg"},
    {EventKind::ModelRaw, "model_raw"},
    {EventKind::Scores, "scores"},
    {EventKind::DecisionRequired, "decision_required"},
    {EventKind::UserDecision, "user_decision"},
    {EventKind::Outcome, "outcome"},
    {EventKind::SessionEnd, "session_end"},
};

}  // namespace

std::string_view to_string(EventKind k) {
  for (const auto& [kind, name] : kKindNames) {
    if (kind == k) return name;
  }
  return "";
}

std::optional<EventKind> event_kind_from_string(std::string_view s) {
  for (const auto& [kind, name] : kKindNames) {
    if (name == s) return kind;
  }
  return std::nullopt;
}

Event SessionRecord::header() const {
  return Event{created_ts_us, EventKind::SessionStart,
               {{"session_id", session_id}, {"config", to_json(config)}}};
}

filter::WordBank word_bank_of(const SessionRecord& record) {
  filter::WordBank wb;
  for (const auto& e : record.events) {
    if (e.kind != EventKind::UserDecision || !e.payload.contains("updates")) continue;
    const auto turn = e.payload.value("turn", std::uint64_t{0});
    for (const auto& u : e.payload.at("updates")) {
      auto status = filter::word_status_from_string(u.at("status").get<std::string>());
      if (!status) throw Error(ErrorCode::ParseError, "bad word-bank status in user_decision");
      wb.set(u.at("ngram").get<std::string>(), *status, e.ts_us, turn);
    }
  }
  return wb;
}

std::string serialize_event(const Event& e) {
  nlohmann::json j = {{"ts", e.ts_us}, {"kind", std::string(to_string(e.kind))}, {"payload", e.payload}};
  return j.dump();
}

Event parse_event(std::string_view line) {
  auto j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error(ErrorCode::ParseError, "event line is not a JSON object");
  if (!j.contains("ts") || !j["ts"].is_number_integer() || !j.contains("kind") || !j["kind"].is_string()) {
    throw Error(ErrorCode::ParseError, "event line lacks integer ts or string kind");
  }
  auto kind = event_kind_from_string(j["kind"].get<std::string>());
  if (!kind) throw Error(ErrorCode::ParseError, "unknown event kind '" + j["kind"].get<std::string>() + "'");
  Event e;
  e.ts_us = j["ts"].get<std::int64_t>();
  e.kind = *kind;
  e.payload = j.contains("payload") ? j["payload"] : nlohmann::json::object();
  return e;
}

std::string serialize_record(const SessionRecord& record) {
  std::string out = serialize_event(record.header());
  out.push_back('\n');
  for (const auto& e : record.events) {
    out += serialize_event(e);
    out.push_back('\n');
  }
  return out;
}

SessionRecord parse_record(std::string_view jsonl) {
  SessionRecord rec;
  bool have_header = false;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < jsonl.size()) {
    auto nl = jsonl.find('\n', start);
    auto line = jsonl.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    start = nl == std::string_view::npos ? jsonl.size() : nl + 1;
    ++line_no;
    if (text::trim(line).empty()) continue;
    Event e;
    try {
      e = parse_event(line);
    } catch (const Error& err) {
      throw Error(ErrorCode::ParseError, "record line " + std::to_string(line_no) + ": " + err.what());
    }
    if (!have_header) {
      if (e.kind != EventKind::SessionStart) {
        throw Error(ErrorCode::ParseError, "record does not start with a session_start header");
      }
      try {
        rec.session_id = e.payload.at("session_id").get<std::string>();
        rec.config = session_config_from_json(e.payload.at("config"));
      } catch (const nlohmann::json::exception& err) {
        throw Error(ErrorCode::ParseError, std::string("malformed session_start header: ") + err.what());
      }
      rec.created_ts_us = e.ts_us;
      have_header = true;
      continue;
    }
    if (e.kind == EventKind::SessionStart) {
      throw Error(ErrorCode::ParseError, "duplicate session_start at line " + std::to_string(line_no));
    }
    rec.events.push_back(std::move(e));
  }
  if (!have_header) throw Error(ErrorCode::ParseError, "empty session record");
  return rec;
}

}  // namespace recourse::session

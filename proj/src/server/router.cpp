#include "recourse/server/router.hpp"

#include <vector>

#include "recourse/text/pipeline.hpp"

namespace recourse::server {
namespace {

using nlohmann::json;

std::vector<std::string_view> split_path(std::string_view target) {
  if (auto q = target.find('?'); q != std::string_view::npos) target = target.substr(0, q);
  std::vector<std::string_view> parts;
  std::size_t pos = 0;
  while (pos < target.size()) {
    auto next = target.find('/', pos);
    if (next == std::string_view::npos) next = target.size();
    if (next > pos) parts.push_back(target.substr(pos, next - pos));
    pos = next + 1;
  }
  return parts;
}

json parse_body(std::string_view body) {
  if (!text::is_valid_utf8(body)) throw Error(ErrorCode::InvalidInput, "request body is not valid UTF-8");
  if (text::trim(body).empty()) return json::object();
  try {
    auto j = json::parse(body);
    if (!j.is_object()) throw Error(ErrorCode::InvalidInput, "request body must be a JSON object");
    return j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidInput, std::string("malformed JSON: ") + e.what());
  }
}

std::string require_string(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    throw Error(ErrorCode::InvalidInput, std::string("field '") + key + "' must be a string");
  }
  return it->get<std::string>();
}

filter::UserDecision parse_decision(const json& j) {
  filter::UserDecision d;
  d.prompt_id = require_string(j, "prompt_id");
  auto a1 = filter::view_choice_from_string(require_string(j, "a1"));
  if (!a1) throw Error(ErrorCode::InvalidInput, "a1 must be 'view' or 'decline'");
  d.a1 = *a1;
  if (j.contains("a2") && !j.at("a2").is_null()) {
    auto a2 = filter::future_choice_from_string(require_string(j, "a2"));
    if (!a2) throw Error(ErrorCode::InvalidInput, "a2 must be 'approve', 'defer' or 'block'");
    d.a2 = *a2;
  }
  d.validate();
  return d;
}

ApiResponse method_not_allowed(std::string_view method) {
  return {405, error_body(ErrorCode::InvalidInput, std::string("method ") + std::string(method) + " not allowed")};
}

}  // namespace

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput:
    case ErrorCode::InvalidConfig:
    case ErrorCode::ParseError:
    case ErrorCode::DuplicatePhrase:
    case ErrorCode::OutOfRange:
    case ErrorCode::WrongArity:
    case ErrorCode::TooFewPairs:
      return 400;
    case ErrorCode::NotFound:
    case ErrorCode::UnknownPrompt:
    case ErrorCode::PromptAlreadyResolved:
      return 404;
    case ErrorCode::PromptPending:
    case ErrorCode::IllegalTransition:
      return 409;
    case ErrorCode::SessionClosed:
      return 410;
    case ErrorCode::RemoteUnavailable:
    case ErrorCode::ModelUnavailable:
    case ErrorCode::ScriptExhausted:
      return 503;
    case ErrorCode::IoError:
      return 500;
  }
  return 500;
}

json error_body(ErrorCode code, std::string_view message) {
  return {{"code", std::string(to_string(code))}, {"message", std::string(message)}};
}

json participant_transcript(const session::SessionRecord& record) {
  using session::EventKind;
  auto events = json::array();
  for (const auto& e : record.events) {
    switch (e.kind) {
      case EventKind::SessionStart:
      case EventKind::ModelRaw:
      case EventKind::Scores:
        continue;
      default:
        break;
    }
    auto payload = e.payload;
    if (e.kind == EventKind::Outcome) {
      payload.erase("filter");
      payload.erase("reason");
    }
    events.push_back({{"ts", e.ts_us}, {"kind", std::string(session::to_string(e.kind))}, {"payload", payload}});
  }
  return {{"session_id", record.session_id}, {"events", events}};
}

std::optional<std::string> Router::stream_session(std::string_view target) {
  const auto p = split_path(target);
  if (p.size() == 4 && p[0] == "v1" && p[1] == "sessions" && p[3] == "stream") return std::string(p[2]);
  return std::nullopt;
}

ApiResponse Router::handle(std::string_view method, std::string_view target, std::string_view body) const {
  const auto p = split_path(target);
  try {
    if (p.size() == 1 && p[0] == "healthz") {
      if (method != "GET") return method_not_allowed(method);
      return {200, {{"status", "ok"}}};
    }
    if (p.size() >= 2 && p[0] == "v1" && p[1] == "sessions") {
      if (p.size() == 2) {
        if (method != "POST") return method_not_allowed(method);
        const auto id = service_.create_session(parse_body(body));
        return {201, {{"session_id", id}}};
      }
      if (p.size() == 4) {
        const std::string id(p[2]);
        const auto action = p[3];
        if (action == "messages") {
          if (method != "POST") return method_not_allowed(method);
          const auto req = parse_body(body);
          return {200, session::to_json(service_.post_user_message(id, require_string(req, "text")))};
        }
        if (action == "decisions") {
          if (method != "POST") return method_not_allowed(method);
          return {200, session::to_json(service_.post_decision(id, parse_decision(parse_body(body))))};
        }
        if (action == "wordbank") {
          if (method != "GET") return method_not_allowed(method);
          return {200, {{"session_id", id}, {"entries", filter::to_json(service_.word_bank(id))}}};
        }
        if (action == "transcript") {
          if (method != "GET") return method_not_allowed(method);
          return {200, participant_transcript(service_.record(id))};
        }
        if (action == "stream") {
          return {400, error_body(ErrorCode::InvalidInput, "stream requires a WebSocket upgrade")};
        }
      }
    }
    return {404, error_body(ErrorCode::NotFound, "no route for " + std::string(method) + " " + std::string(target))};
  } catch (const Error& e) {
    return {http_status(e.code()), error_body(e.code(), e.what())};
  } catch (const std::exception& e) {
    return {500, {{"code", "Internal"}, {"message", e.what()}}};
  }
}

}  // namespace recourse::server

#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"
#include "recourse/error.hpp"
#include "recourse/session/service.hpp"

namespace recourse::server {

struct ApiResponse {
  int status = 200;
  nlohmann::json body;
};

int http_status(ErrorCode code);
nlohmann::json error_body(ErrorCode code, std::string_view message);

// Maps (method, target, body) to a JSON response. Transport-free so the
// whole API surface can be exercised without sockets.
//
//   POST /v1/sessions                      -> 201 {session_id}
//   POST /v1/sessions/{id}/messages        {text}               -> TurnOutcome
//   POST /v1/sessions/{id}/decisions       {prompt_id, a1, a2?} -> TurnOutcome
//   GET  /v1/sessions/{id}/wordbank        -> {entries: [...]}
//   GET  /v1/sessions/{id}/transcript      -> {session_id, events: [...]}
//   GET  /healthz                          -> {status: "ok"}
//
// Errors are {code, message}. The transcript is the participant's view: it
// omits the configuration header, raw model output, scores and the
// filter/reason fields of outcomes, so neither withheld text nor the
// condition can be read from it.
class Router {
 public:
  explicit Router(session::SessionService& service) : service_(service) {}

  ApiResponse handle(std::string_view method, std::string_view target, std::string_view body) const;

  // Session id if target is /v1/sessions/{id}/stream.
  static std::optional<std::string> stream_session(std::string_view target);

 private:
  session::SessionService& service_;
};

nlohmann::json participant_transcript(const session::SessionRecord& record);

}  // namespace recourse::server

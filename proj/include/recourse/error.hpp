#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace recourse {

enum class ErrorCode {
  InvalidInput,
  InvalidConfig,
  ParseError,
  DuplicatePhrase,
  RemoteUnavailable,
  ModelUnavailable,
  ScriptExhausted,
  UnknownPrompt,
  PromptAlreadyResolved,
  PromptPending,
  IllegalTransition,
  SessionClosed,
  NotFound,
  OutOfRange,
  WrongArity,
  TooFewPairs,
  IoError,
};

std::string_view to_string(ErrorCode code);

// Every failure the library reports carries one of the codes above; the HTTP
// layer forwards the code name verbatim as `{code, message}`.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace recourse

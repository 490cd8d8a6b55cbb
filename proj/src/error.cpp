#include "recourse/error.hpp"

namespace recourse {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DuplicatePhrase: return "DuplicatePhrase";
    case ErrorCode::RemoteUnavailable: return "RemoteUnavailable";
    case ErrorCode::ModelUnavailable: return "ModelUnavailable";
    case ErrorCode::ScriptExhausted: return "ScriptExhausted";
    case ErrorCode::UnknownPrompt: return "UnknownPrompt";
    case ErrorCode::PromptAlreadyResolved: return "PromptAlreadyResolved";
    case ErrorCode::PromptPending: return "PromptPending";
    case ErrorCode::IllegalTransition: return "IllegalTransition";
    case ErrorCode::SessionClosed: return "SessionClosed";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::WrongArity: return "WrongArity";
    case ErrorCode::TooFewPairs: return "TooFewPairs";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace recourse

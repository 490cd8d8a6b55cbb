#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "recourse/net/json_client.hpp"

namespace recourse::model {

enum class Role { User, Model, System };

std::string_view to_string(Role r);

struct ChatTurn {
  Role role = Role::User;
  std::string text;
  std::int64_t ts_us = 0;
};

// Conversational model behind the filter. respond() requires the last turn
// to be a user turn (Error(InvalidInput) otherwise) and never touches history.
class ChatModel {
 public:
  virtual ~ChatModel() = default;
  virtual std::string respond(std::span<const ChatTurn> history) = 0;
};

// Returns the user's text verbatim.
class EchoModel final : public ChatModel {
 public:
  std::string respond(std::span<const ChatTurn> history) override;
};

enum class Exhaustion { RepeatLast, Error };

// Canned responses served in order. An entry holding nullopt makes that call
// fail with ModelUnavailable, which lets replays reproduce outages.
struct ScriptedTranscript {
  std::vector<std::optional<std::string>> responses;
  Exhaustion exhaustion = Exhaustion::Error;
};

class ScriptedModel final : public ChatModel {
 public:
  // Throws Error(InvalidInput) for an empty script.
  explicit ScriptedModel(ScriptedTranscript script);

  // Throws Error(ScriptExhausted) past the end under Exhaustion::Error.
  std::string respond(std::span<const ChatTurn> history) override;

  std::size_t calls() const { return calls_; }

 private:
  ScriptedTranscript script_;
  std::size_t calls_ = 0;
};

// JSONL, one {"response": "..."} object per line; blank lines skipped.
ScriptedTranscript load_script(const std::filesystem::path& path,
                               Exhaustion exhaustion = Exhaustion::Error);
ScriptedTranscript parse_script(std::string_view contents, Exhaustion exhaustion = Exhaustion::Error);

struct RemoteChatOptions {
  std::string endpoint;
  std::string auth_token;      // sent as "Authorization: Bearer ..." when set
  std::string system_prompt;
  std::size_t max_history_turns = 40;
  net::RetryPolicy retry{};
};

// Request body {system, messages:[{role,text}...]} holding at most the last
// `max_history_turns` non-system turns.
nlohmann::json build_chat_request(std::span<const ChatTurn> history, const RemoteChatOptions& options);

// Any chat-completion endpoint accepting build_chat_request() bodies and
// answering {text}. Safe to share across sessions.
class RemoteChatModel final : public ChatModel {
 public:
  explicit RemoteChatModel(RemoteChatOptions options);

  // Throws Error(ModelUnavailable) once retries are exhausted or the reply
  // lacks a non-empty `text`.
  std::string respond(std::span<const ChatTurn> history) override;

 private:
  RemoteChatOptions options_;
  net::Endpoint endpoint_;
};

}  // namespace recourse::model

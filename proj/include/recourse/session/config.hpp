#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"
#include "recourse/filter/engine.hpp"

namespace recourse::session {

enum class Condition { Fixed, Dynamic };

std::string_view to_string(Condition c);
std::optional<Condition> condition_from_string(std::string_view s);

inline constexpr std::string_view kDefaultMessage = "[user safe response triggered] I don't know.";

struct ScorerSpec {
  std::string kind = "lexicon";  // "lexicon" | "perspective"
  std::string endpoint;
  std::string api_key_env;
  std::string lexicon_path;
  std::int64_t timeout_ms = 5000;

  friend bool operator==(const ScorerSpec&, const ScorerSpec&) = default;
};

struct ModelSpec {
  std::string kind = "echo";  // "echo" | "scripted" | "remote"
  std::string endpoint;
  std::string auth_token_env;
  std::string system_prompt;
  std::string script_path;
  std::int64_t max_history_turns = 40;
  std::int64_t timeout_ms = 30000;

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

struct SessionConfig {
  Condition condition = Condition::Dynamic;
  filter::Thresholds thresholds{};
  ScorerSpec scorer{};
  ModelSpec model{};
  std::string default_message{kDefaultMessage};
  std::string topic_hint = "identity";
  std::int64_t time_limit_s = 600;
  // Name used in the recourse prompt wording ("<agent>'s response contains ...").
  std::string agent_name = "The chatbot";

  // Throws Error(InvalidConfig).
  void validate() const;

  friend bool operator==(const SessionConfig&, const SessionConfig&) = default;
};

nlohmann::json to_json(const SessionConfig& cfg);
// Missing keys keep their defaults. Throws Error(InvalidConfig) on bad types
// or values.
SessionConfig session_config_from_json(const nlohmann::json& j, SessionConfig base = {});

// Service-wide configuration file:
//   {scorer:{kind, endpoint?, api_key_env?, lexicon_path?},
//    model:{kind, endpoint?, system_prompt?, script_path?},
//    thresholds:{h_star, h_max}, default_message, data_dir, time_limit_s,
//    stopwords_path?, agent_name?}
// Relative paths resolve against the config file's directory.
struct ServiceConfig {
  SessionConfig defaults{};
  std::filesystem::path data_dir = "data/sessions";
  std::filesystem::path stopwords_path;  // empty: the bundled list

  SessionConfig session_defaults(Condition c) const;
};

ServiceConfig parse_service_config(const nlohmann::json& j, const std::filesystem::path& base_dir);
ServiceConfig load_service_config(const std::filesystem::path& path);

}  // namespace recourse::session

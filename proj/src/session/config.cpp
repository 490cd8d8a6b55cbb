#include "recourse/session/config.hpp"

#include <fstream>

#include "recourse/error.hpp"
#include "recourse/text/pipeline.hpp"

namespace recourse::session {
namespace {

template <typename T>
void read_field(const nlohmann::json& j, const char* key, T& out) {
  if (!j.contains(key) || j.at(key).is_null()) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("config key '") + key + "': " + e.what());
  }
}

void require_object(const nlohmann::json& j, const char* what) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, std::string(what) + " must be a JSON object");
}

ScorerSpec scorer_from_json(const nlohmann::json& j, ScorerSpec s) {
  require_object(j, "scorer");
  read_field(j, "kind", s.kind);
  read_field(j, "endpoint", s.endpoint);
  read_field(j, "api_key_env", s.api_key_env);
  read_field(j, "lexicon_path", s.lexicon_path);
  read_field(j, "timeout_ms", s.timeout_ms);
  return s;
}

ModelSpec model_from_json(const nlohmann::json& j, ModelSpec m) {
  require_object(j, "model");
  read_field(j, "kind", m.kind);
  read_field(j, "endpoint", m.endpoint);
  read_field(j, "auth_token_env", m.auth_token_env);
  read_field(j, "system_prompt", m.system_prompt);
  read_field(j, "script_path", m.script_path);
  read_field(j, "max_history_turns", m.max_history_turns);
  read_field(j, "timeout_ms", m.timeout_ms);
  return m;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  if (p.empty()) return {};
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

std::string_view to_string(Condition c) { return c == Condition::Fixed ? "fixed" : "dynamic"; }

std::optional<Condition> condition_from_string(std::string_view s) {
  if (s == "fixed") return Condition::Fixed;
  if (s == "dynamic") return Condition::Dynamic;
  return std::nullopt;
}

void SessionConfig::validate() const {
  thresholds.validate();
  if (text::trim(default_message).empty()) {
    throw Error(ErrorCode::InvalidConfig, "default_message must not be empty");
  }
  if (time_limit_s <= 0) throw Error(ErrorCode::InvalidConfig, "time_limit_s must be positive");
  if (scorer.kind != "lexicon" && scorer.kind != "perspective") {
    throw Error(ErrorCode::InvalidConfig, "unknown scorer kind '" + scorer.kind + "'");
  }
  if (model.kind != "echo" && model.kind != "scripted" && model.kind != "remote") {
    throw Error(ErrorCode::InvalidConfig, "unknown model kind '" + model.kind + "'");
  }
  if (model.max_history_turns <= 0) {
    throw Error(ErrorCode::InvalidConfig, "model.max_history_turns must be positive");
  }
}

nlohmann::json to_json(const SessionConfig& cfg) {
  return {
      {"condition", std::string(to_string(cfg.condition))},
      {"thresholds", {{"h_star", cfg.thresholds.h_star}, {"h_max", cfg.thresholds.h_max}}},
      {"scorer",
       {{"kind", cfg.scorer.kind},
        {"endpoint", cfg.scorer.endpoint},
        {"api_key_env", cfg.scorer.api_key_env},
        {"lexicon_path", cfg.scorer.lexicon_path},
        {"timeout_ms", cfg.scorer.timeout_ms}}},
      {"model",
       {{"kind", cfg.model.kind},
        {"endpoint", cfg.model.endpoint},
        {"auth_token_env", cfg.model.auth_token_env},
        {"system_prompt", cfg.model.system_prompt},
        {"script_path", cfg.model.script_path},
        {"max_history_turns", cfg.model.max_history_turns},
        {"timeout_ms", cfg.model.timeout_ms}}},
      {"default_message", cfg.default_message},
      {"topic_hint", cfg.topic_hint},
      {"time_limit_s", cfg.time_limit_s},
      {"agent_name", cfg.agent_name},
  };
}

SessionConfig session_config_from_json(const nlohmann::json& j, SessionConfig cfg) {
  require_object(j, "session config");
  if (j.contains("condition")) {
    std::string c;
    read_field(j, "condition", c);
    auto parsed = condition_from_string(c);
    if (!parsed) throw Error(ErrorCode::InvalidConfig, "condition must be 'fixed' or 'dynamic'");
    cfg.condition = *parsed;
  }
  if (j.contains("thresholds")) {
    const auto& t = j.at("thresholds");
    require_object(t, "thresholds");
    read_field(t, "h_star", cfg.thresholds.h_star);
    read_field(t, "h_max", cfg.thresholds.h_max);
  }
  if (j.contains("scorer")) cfg.scorer = scorer_from_json(j.at("scorer"), cfg.scorer);
  if (j.contains("model")) cfg.model = model_from_json(j.at("model"), cfg.model);
  read_field(j, "default_message", cfg.default_message);
  read_field(j, "topic_hint", cfg.topic_hint);
  read_field(j, "time_limit_s", cfg.time_limit_s);
  read_field(j, "agent_name", cfg.agent_name);
  cfg.validate();
  return cfg;
}

SessionConfig ServiceConfig::session_defaults(Condition c) const {
  auto cfg = defaults;
  cfg.condition = c;
  return cfg;
}

ServiceConfig parse_service_config(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  require_object(j, "service config");
  ServiceConfig sc;
  sc.defaults = session_config_from_json(j);
  sc.defaults.scorer.lexicon_path = resolve(base_dir, sc.defaults.scorer.lexicon_path).string();
  sc.defaults.model.script_path = resolve(base_dir, sc.defaults.model.script_path).string();
  std::string data_dir, stopwords;
  read_field(j, "data_dir", data_dir);
  read_field(j, "stopwords_path", stopwords);
  sc.data_dir = data_dir.empty() ? base_dir / "data" / "sessions" : resolve(base_dir, data_dir);
  sc.stopwords_path = resolve(base_dir, stopwords);
  return sc;
}

ServiceConfig load_service_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config '" + path.string() + "'");
  auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::InvalidConfig, "config '" + path.string() + "' is not valid JSON");
  auto base = path.parent_path();
  if (base.empty()) base = ".";
  return parse_service_config(j, base);
}

}  // namespace recourse::session

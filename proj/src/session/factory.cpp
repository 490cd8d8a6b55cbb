#include "recourse/session/factory.hpp"

#include <cstdlib>

#include "recourse/error.hpp"
#include "recourse/scoring/lexicon.hpp"
#include "recourse/scoring/perspective.hpp"

namespace recourse::session {
namespace {

std::string env_or_empty(const std::string& name) {
  if (name.empty()) return {};
  const char* v = std::getenv(name.c_str());
  return v ? std::string(v) : std::string();
}

}  // namespace

std::shared_ptr<const scoring::Scorer> make_scorer(const ScorerSpec& spec) {
  if (spec.kind == "lexicon") {
    if (spec.lexicon_path.empty()) throw Error(ErrorCode::InvalidConfig, "lexicon scorer needs lexicon_path");
    return std::make_shared<scoring::LexiconScorer>(scoring::load_lexicon(spec.lexicon_path));
  }
  if (spec.kind == "perspective") {
    if (spec.endpoint.empty()) throw Error(ErrorCode::InvalidConfig, "perspective scorer needs an endpoint");
    scoring::PerspectiveOptions opts;
    opts.endpoint = spec.endpoint;
    opts.api_key = env_or_empty(spec.api_key_env);
    opts.retry.timeout = std::chrono::milliseconds(spec.timeout_ms);
    return std::make_shared<scoring::PerspectiveScorer>(std::move(opts));
  }
  throw Error(ErrorCode::InvalidConfig, "unknown scorer kind '" + spec.kind + "'");
}

std::shared_ptr<model::ChatModel> make_model(const ModelSpec& spec) {
  if (spec.kind == "echo") return std::make_shared<model::EchoModel>();
  if (spec.kind == "scripted") {
    if (spec.script_path.empty()) throw Error(ErrorCode::InvalidConfig, "scripted model needs script_path");
    return std::make_shared<model::ScriptedModel>(model::load_script(spec.script_path));
  }
  if (spec.kind == "remote") {
    if (spec.endpoint.empty()) throw Error(ErrorCode::InvalidConfig, "remote model needs an endpoint");
    model::RemoteChatOptions opts;
    opts.endpoint = spec.endpoint;
    opts.auth_token = env_or_empty(spec.auth_token_env);
    opts.system_prompt = spec.system_prompt;
    opts.max_history_turns = static_cast<std::size_t>(spec.max_history_turns);
    opts.retry.timeout = std::chrono::milliseconds(spec.timeout_ms);
    return std::make_shared<model::RemoteChatModel>(std::move(opts));
  }
  throw Error(ErrorCode::InvalidConfig, "unknown model kind '" + spec.kind + "'");
}

}  // namespace recourse::session

#include "recourse/model/gateway.hpp"

#include <fstream>
#include <sstream>

#include "recourse/error.hpp"
#include "recourse/text/pipeline.hpp"

namespace recourse::model {
namespace {

const ChatTurn& require_user_last(std::span<const ChatTurn> history) {
  if (history.empty() || history.back().role != Role::User) {
    throw Error(ErrorCode::InvalidInput, "model history must end with a user turn");
  }
  return history.back();
}

}  // namespace

std::string_view to_string(Role r) {
  switch (r) {
    case Role::User: return "user";
    case Role::Model: return "model";
    case Role::System: return "system";
  }
  return "";
}

std::string EchoModel::respond(std::span<const ChatTurn> history) {
  return require_user_last(history).text;
}

ScriptedModel::ScriptedModel(ScriptedTranscript script) : script_(std::move(script)) {
  if (script_.responses.empty()) {
    throw Error(ErrorCode::InvalidInput, "scripted model needs at least one response");
  }
}

std::string ScriptedModel::respond(std::span<const ChatTurn> history) {
  require_user_last(history);
  auto index = calls_++;
  if (index >= script_.responses.size()) {
    if (script_.exhaustion == Exhaustion::Error) {
      throw Error(ErrorCode::ScriptExhausted,
                  "script has " + std::to_string(script_.responses.size()) + " responses");
    }
    index = script_.responses.size() - 1;
  }
  const auto& r = script_.responses[index];
  if (!r) throw Error(ErrorCode::ModelUnavailable, "scripted outage at call " + std::to_string(index + 1));
  return *r;
}

ScriptedTranscript parse_script(std::string_view contents, Exhaustion exhaustion) {
  ScriptedTranscript script;
  script.exhaustion = exhaustion;
  std::istringstream in{std::string(contents)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("response") || !j["response"].is_string()) {
      throw Error(ErrorCode::ParseError,
                  "script line " + std::to_string(line_no) + ": expected {\"response\": string}");
    }
    script.responses.emplace_back(j["response"].get<std::string>());
  }
  return script;
}

ScriptedTranscript load_script(const std::filesystem::path& path, Exhaustion exhaustion) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open script '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_script(buf.str(), exhaustion);
}

nlohmann::json build_chat_request(std::span<const ChatTurn> history, const RemoteChatOptions& options) {
  std::vector<const ChatTurn*> turns;
  for (const auto& t : history) {
    if (t.role != Role::System) turns.push_back(&t);
  }
  const auto skip = turns.size() > options.max_history_turns ? turns.size() - options.max_history_turns : 0;
  auto messages = nlohmann::json::array();
  for (std::size_t i = skip; i < turns.size(); ++i) {
    messages.push_back({{"role", std::string(to_string(turns[i]->role))}, {"text", turns[i]->text}});
  }
  return {{"system", options.system_prompt}, {"messages", messages}};
}

RemoteChatModel::RemoteChatModel(RemoteChatOptions options)
    : options_(std::move(options)), endpoint_(net::parse_endpoint(options_.endpoint)) {}

std::string RemoteChatModel::respond(std::span<const ChatTurn> history) {
  require_user_last(history);
  std::vector<std::pair<std::string, std::string>> headers;
  if (!options_.auth_token.empty()) headers.emplace_back("Authorization", "Bearer " + options_.auth_token);
  auto res = net::post_json(endpoint_, build_chat_request(history, options_), headers, options_.retry);
  if (!res.ok) throw Error(ErrorCode::ModelUnavailable, "chat endpoint unavailable: " + res.detail);
  if (!res.body.contains("text") || !res.body["text"].is_string() ||
      text::trim(res.body["text"].get<std::string>()).empty()) {
    throw Error(ErrorCode::ModelUnavailable, "chat endpoint returned no text");
  }
  return res.body["text"].get<std::string>();
}

}  // namespace recourse::model

#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <vector>

#include "recourse/session/session.hpp"

namespace recourse::session {

struct ServiceDeps {
  std::shared_ptr<const text::StopList> stoplist;
  std::shared_ptr<Clock> clock;
  std::shared_ptr<SessionStore> store;  // null: sessions live in memory only
  std::function<std::shared_ptr<const scoring::Scorer>(const ScorerSpec&)> scorer_factory;
  std::function<std::shared_ptr<model::ChatModel>(const ModelSpec&)> model_factory;
  std::function<std::string()> id_generator;  // null: random 128-bit hex ids
};

// Registry of live sessions. Safe for concurrent use: distinct sessions run
// independently while calls on one session are serialized. Scorers are built
// once per distinct scorer spec and shared, read-only, across sessions.
class SessionService {
 public:
  SessionService(ServiceConfig config, ServiceDeps deps);

  const ServiceConfig& config() const { return config_; }

  // Throws Error(InvalidConfig).
  std::string create_session(const SessionConfig& cfg);
  // Applies request keys (condition, thresholds, default_message, ...) on top
  // of the service defaults.
  std::string create_session(const nlohmann::json& request);

  TurnOutcome post_user_message(const std::string& id, const std::string& text);
  TurnOutcome post_decision(const std::string& id, const filter::UserDecision& decision);

  // Live sessions first, then the store. Throws Error(NotFound).
  filter::WordBank word_bank(const std::string& id);
  SessionRecord record(const std::string& id);
  std::optional<PromptPayload> open_prompt(const std::string& id);

  // One <id>.jsonl per session; an empty id list writes nothing.
  std::vector<std::filesystem::path> export_transcripts(const std::vector<std::string>& ids,
                                                        const std::filesystem::path& dest);

  int subscribe(const std::string& id, Session::Listener listener);
  void unsubscribe(const std::string& id, int token);

  // Closes live sessions whose time limit has passed; returns how many.
  std::size_t sweep_expired();
  void close_all();

 private:
  struct Slot {
    std::mutex mu;
    std::unique_ptr<Session> session;
  };

  std::shared_ptr<Slot> find(const std::string& id);
  std::shared_ptr<const scoring::Scorer> scorer_for(const ScorerSpec& spec);

  ServiceConfig config_;
  ServiceDeps deps_;
  std::shared_mutex mu_;
  std::map<std::string, std::shared_ptr<Slot>> sessions_;
  std::mutex scorer_mu_;
  std::map<std::string, std::shared_ptr<const scoring::Scorer>> scorers_;
};

std::string random_session_id();

}  // namespace recourse::session

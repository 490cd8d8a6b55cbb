#include "recourse/session/service.hpp"

#include <random>

#include "recourse/error.hpp"
#include "recourse/session/factory.hpp"

namespace recourse::session {

std::string random_session_id() {
  static std::mutex mu;
  static std::mt19937_64 rng{std::random_device{}()};
  std::lock_guard lock(mu);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string id;
  for (int word = 0; word < 2; ++word) {
    auto v = rng();
    for (int i = 0; i < 16; ++i, v >>= 4) id.push_back(kHex[v & 0xF]);
  }
  return id;
}

SessionService::SessionService(ServiceConfig config, ServiceDeps deps)
    : config_(std::move(config)), deps_(std::move(deps)) {
  if (!deps_.stoplist) throw Error(ErrorCode::InvalidConfig, "service needs a stop list");
  if (!deps_.clock) deps_.clock = std::make_shared<SystemClock>();
  if (!deps_.scorer_factory) deps_.scorer_factory = make_scorer;
  if (!deps_.model_factory) deps_.model_factory = make_model;
  if (!deps_.id_generator) deps_.id_generator = random_session_id;
}

std::shared_ptr<const scoring::Scorer> SessionService::scorer_for(const ScorerSpec& spec) {
  const auto key = to_json(SessionConfig{.scorer = spec})["scorer"].dump();
  std::lock_guard lock(scorer_mu_);
  auto& slot = scorers_[key];
  if (!slot) slot = deps_.scorer_factory(spec);
  return slot;
}

std::string SessionService::create_session(const SessionConfig& cfg) {
  cfg.validate();
  auto scorer = scorer_for(cfg.scorer);
  auto model = deps_.model_factory(cfg.model);

  std::unique_lock lock(mu_);
  std::string id;
  do {
    id = deps_.id_generator();
  } while (sessions_.contains(id) || (deps_.store && deps_.store->contains(id)));
  auto slot = std::make_shared<Slot>();
  slot->session = std::make_unique<Session>(
      id, cfg, SessionDeps{std::move(scorer), std::move(model), deps_.stoplist, deps_.clock, deps_.store});
  sessions_.emplace(id, std::move(slot));
  return id;
}

std::string SessionService::create_session(const nlohmann::json& request) {
  return create_session(session_config_from_json(request.is_null() ? nlohmann::json::object() : request,
                                                 config_.defaults));
}

std::shared_ptr<SessionService::Slot> SessionService::find(const std::string& id) {
  std::shared_lock lock(mu_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

TurnOutcome SessionService::post_user_message(const std::string& id, const std::string& text) {
  auto slot = find(id);
  if (!slot) {
    if (deps_.store && deps_.store->contains(id)) throw Error(ErrorCode::SessionClosed, "session " + id + " is closed");
    throw Error(ErrorCode::NotFound, "no session '" + id + "'");
  }
  std::lock_guard lock(slot->mu);
  return slot->session->post_user_message(text);
}

TurnOutcome SessionService::post_decision(const std::string& id, const filter::UserDecision& decision) {
  auto slot = find(id);
  if (!slot) {
    if (deps_.store && deps_.store->contains(id)) throw Error(ErrorCode::SessionClosed, "session " + id + " is closed");
    throw Error(ErrorCode::NotFound, "no session '" + id + "'");
  }
  std::lock_guard lock(slot->mu);
  return slot->session->post_decision(decision);
}

filter::WordBank SessionService::word_bank(const std::string& id) {
  if (auto slot = find(id)) {
    std::lock_guard lock(slot->mu);
    return slot->session->word_bank();
  }
  return word_bank_of(record(id));
}

SessionRecord SessionService::record(const std::string& id) {
  if (auto slot = find(id)) {
    std::lock_guard lock(slot->mu);
    return slot->session->record();
  }
  if (deps_.store && deps_.store->contains(id)) return deps_.store->load(id);
  throw Error(ErrorCode::NotFound, "no session '" + id + "'");
}

std::optional<PromptPayload> SessionService::open_prompt(const std::string& id) {
  if (auto slot = find(id)) {
    std::lock_guard lock(slot->mu);
    return slot->session->open_prompt();
  }
  record(id);  // NotFound check
  return std::nullopt;
}

std::vector<std::filesystem::path> SessionService::export_transcripts(const std::vector<std::string>& ids,
                                                                      const std::filesystem::path& dest) {
  std::vector<SessionRecord> records;
  records.reserve(ids.size());
  for (const auto& id : ids) records.push_back(record(id));  // all-or-nothing on NotFound
  std::vector<std::filesystem::path> out;
  for (const auto& r : records) out.push_back(write_record(r, dest));
  return out;
}

int SessionService::subscribe(const std::string& id, Session::Listener listener) {
  auto slot = find(id);
  if (!slot) throw Error(ErrorCode::NotFound, "no live session '" + id + "'");
  std::lock_guard lock(slot->mu);
  return slot->session->subscribe(std::move(listener));
}

void SessionService::unsubscribe(const std::string& id, int token) {
  if (auto slot = find(id)) {
    std::lock_guard lock(slot->mu);
    slot->session->unsubscribe(token);
  }
}

std::size_t SessionService::sweep_expired() {
  std::vector<std::shared_ptr<Slot>> slots;
  {
    std::shared_lock lock(mu_);
    for (const auto& [id, slot] : sessions_) slots.push_back(slot);
  }
  std::size_t closed = 0;
  for (const auto& slot : slots) {
    std::lock_guard lock(slot->mu);
    if (!slot->session->closed() && slot->session->expire_if_due()) ++closed;
  }
  return closed;
}

void SessionService::close_all() {
  std::vector<std::shared_ptr<Slot>> slots;
  {
    std::shared_lock lock(mu_);
    for (const auto& [id, slot] : sessions_) slots.push_back(slot);
  }
  for (const auto& slot : slots) {
    std::lock_guard lock(slot->mu);
    slot->session->close();
  }
}

}  // namespace recourse::session

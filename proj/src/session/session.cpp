#include "recourse/session/session.hpp"

#include <algorithm>
#include <cstdio>

#include "recourse/error.hpp"

namespace recourse::session {
namespace {

std::string two_decimals(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string display_name(scoring::Category c) {
  std::string s(scoring::name(c));
  std::replace(s.begin(), s.end(), '_', ' ');
  return s;
}

nlohmann::json categories_json(const std::vector<scoring::RankedCategory>& cats) {
  auto arr = nlohmann::json::array();
  for (const auto& c : cats) arr.push_back({{"category", std::string(scoring::name(c.category))}, {"score", c.score}});
  return arr;
}

nlohmann::json span_json(const filter::ScoredSpan& s) {
  return {{"ngram", s.ngram.text}, {"position", s.ngram.position}, {"n", s.ngram.n()}, {"scores", scoring::to_json(s.scores)}};
}

}  // namespace

std::string_view to_string(OutcomeKind k) {
  switch (k) {
    case OutcomeKind::Shown: return "shown";
    case OutcomeKind::DefaultMessage: return "default_message";
    case OutcomeKind::RecoursePrompt: return "recourse_prompt";
    case OutcomeKind::Error: return "error";
  }
  return "";
}

nlohmann::json to_json(const TurnOutcome& o) {
  nlohmann::json j = {{"kind", std::string(to_string(o.kind))}, {"turn", o.turn}};
  if (o.kind == OutcomeKind::RecoursePrompt && o.prompt) {
    const auto& p = *o.prompt;
    j["prompt"] = {{"prompt_id", p.prompt_id},     {"named", p.named},
                   {"flagged", p.flagged},         {"categories", categories_json(p.categories)},
                   {"question", p.question},       {"followup", p.followup}};
  } else {
    j["text"] = o.text;
  }
  if (!o.error_code.empty()) j["code"] = o.error_code;
  return j;
}

std::string viewing_question(const SessionConfig& cfg, const std::vector<std::string>& named,
                             const std::vector<scoring::RankedCategory>& categories) {
  std::string q = cfg.agent_name + "'s response contains ";
  if (named.empty()) {
    q += "content";
  } else {
    q += "[" + named[0] + "]";
    if (named.size() > 1) q += " and [" + named[1] + "]";
  }
  q += ", which we estimate likely falls within the following negative categories: ";
  for (std::size_t i = 0; i < categories.size(); ++i) {
    if (i) q += ", ";
    q += display_name(categories[i].category) + " (" + two_decimals(categories[i].score) + ")";
  }
  q += ". Would you like to see it?";
  return q;
}

std::string filtering_question(const SessionConfig& cfg) {
  return "After seeing " + cfg.agent_name + "'s response, should we filter responses like this in the future?";
}

Session::Session(std::string id, SessionConfig config, SessionDeps deps)
    : deps_(std::move(deps)), cache_(deps_.scorer) {
  config.validate();
  if (!deps_.scorer || !deps_.model || !deps_.stoplist || !deps_.clock) {
    throw Error(ErrorCode::InvalidConfig, "session requires a scorer, model, stop list and clock");
  }
  record_.session_id = std::move(id);
  record_.config = std::move(config);
  record_.created_ts_us = deps_.clock->now_us();
  last_ts_ = record_.created_ts_us;
  if (deps_.sink) deps_.sink->begin(record_);
}

void Session::emit(EventKind kind, nlohmann::json payload, std::optional<std::int64_t> ts) {
  const auto t = std::max(ts ? *ts : deps_.clock->now_us(), last_ts_ + 1);
  last_ts_ = t;
  record_.events.push_back(Event{t, kind, std::move(payload)});
  if (deps_.sink) deps_.sink->append(record_.session_id, record_.events.back());
}

TurnOutcome Session::publish(TurnOutcome outcome) {
  for (const auto& [token, listener] : listeners_) listener(outcome);
  return outcome;
}

int Session::subscribe(Listener listener) {
  const int token = next_listener_++;
  listeners_.emplace(token, std::move(listener));
  return token;
}

void Session::unsubscribe(int token) { listeners_.erase(token); }

bool Session::due(std::int64_t ts) const {
  return ts - record_.created_ts_us >= record_.config.time_limit_s * 1'000'000;
}

bool Session::expire_if_due() {
  if (closed_) return true;
  const auto t = deps_.clock->now_us();
  if (due(t)) close_at(t);
  return closed_;
}

void Session::close() {
  if (closed_) return;
  close_at(deps_.clock->now_us());
}

void Session::close_at(std::int64_t ts) {
  if (closed_) return;
  std::optional<std::int64_t> first = ts;
  if (auto expired = prompts_.expire()) {
    emit(EventKind::Outcome, {{"turn", expired->turn}, {"kind", "expired"}, {"prompt_id", expired->id}}, first);
    first.reset();
    open_payload_.reset();
    withheld_text_.clear();
  }
  emit(EventKind::SessionEnd, {{"word_bank", filter::to_json(word_bank_)}}, first);
  closed_ = true;
}

TurnOutcome Session::serve_default(std::uint64_t turn, std::string_view filter, std::string_view reason) {
  emit(EventKind::Outcome, {{"turn", turn},
                            {"kind", "default_message"},
                            {"filter", std::string(filter)},
                            {"reason", std::string(reason)},
                            {"text", record_.config.default_message}});
  return publish(TurnOutcome{OutcomeKind::DefaultMessage, turn, record_.config.default_message, std::nullopt, {}});
}

TurnOutcome Session::post_user_message(const std::string& text) {
  if (!text::is_valid_utf8(text)) throw Error(ErrorCode::InvalidInput, "message is not valid UTF-8");
  if (text::trim(text).empty()) throw Error(ErrorCode::InvalidInput, "message is empty");
  if (closed_) throw Error(ErrorCode::SessionClosed, "session " + id() + " is closed");

  const auto t = deps_.clock->now_us();
  if (due(t)) {
    close_at(t);
    throw Error(ErrorCode::SessionClosed, "session " + id() + " reached its time limit");
  }
  if (prompts_.current()) {
    throw Error(ErrorCode::PromptPending, "resolve prompt " + prompts_.current()->id + " first");
  }

  const auto turn = ++turn_;
  emit(EventKind::UserMsg, {{"turn", turn}, {"text", text}}, t);
  history_.push_back({model::Role::User, text, last_ts_});

  std::string response;
  try {
    response = deps_.model->respond(history_);
  } catch (const Error& e) {
    emit(EventKind::Outcome, {{"turn", turn},
                              {"kind", "error"},
                              {"code", std::string(recourse::to_string(e.code()))},
                              {"text", e.what()}});
    publish(TurnOutcome{OutcomeKind::Error, turn, e.what(), std::nullopt, std::string(recourse::to_string(e.code()))});
    throw;
  }
  emit(EventKind::ModelRaw, {{"turn", turn}, {"text", response}});
  history_.push_back({model::Role::Model, response, last_ts_});

  const bool dynamic = record_.config.condition == Condition::Dynamic;
  static const filter::WordBank kEmptyBank;
  const auto& bank = dynamic ? word_bank_ : kEmptyBank;

  filter::ScoredResponse sr;
  try {
    sr = filter::score_response(response, *deps_.stoplist, bank,
                                [this](std::span<const std::string> texts) { return cache_.score_batch(texts); });
  } catch (const std::exception& e) {
    emit(EventKind::Scores, {{"turn", turn}, {"error", e.what()}});
    return serve_default(turn, "block", "scorer_error");
  }

  nlohmann::json scores = {{"turn", turn}, {"h_prime", sr.h_prime}, {"excluded_approved", sr.excluded_approved}};
  auto spans = nlohmann::json::array();
  for (const auto& s : sr.spans) spans.push_back(span_json(s));
  scores["spans"] = std::move(spans);
  if (const auto* f = sr.flagged_span()) scores["flagged"] = f->ngram.text;
  if (sr.whole_text) scores["whole_text"] = scoring::to_json(*sr.whole_text);
  emit(EventKind::Scores, std::move(scores));

  const auto decision = dynamic ? filter::dynamic_filter(sr, record_.config.thresholds, word_bank_)
                                : filter::fixed_filter(sr.h_prime, record_.config.thresholds);

  switch (decision.kind) {
    case filter::FilterKind::Show:
      emit(EventKind::Outcome, {{"turn", turn}, {"kind", "shown"}, {"filter", "show"}, {"text", response}});
      return publish(TurnOutcome{OutcomeKind::Shown, turn, response, std::nullopt, {}});
    case filter::FilterKind::Block:
      return serve_default(turn, "block", filter::to_string(decision.reason));
    case filter::FilterKind::Prompt:
      break;
  }

  const auto& preview = *decision.prompt;
  std::vector<std::string> flagged;
  for (const auto& s : preview.flagged) flagged.push_back(s.ngram.text);
  const auto& opened = prompts_.open(turn, flagged);

  PromptPayload payload;
  payload.prompt_id = opened.id;
  payload.named = preview.named;
  payload.flagged = flagged;
  payload.categories = preview.categories;
  payload.question = viewing_question(record_.config, payload.named, payload.categories);
  payload.followup = filtering_question(record_.config);

  emit(EventKind::DecisionRequired, {{"turn", turn},
                                     {"prompt_id", payload.prompt_id},
                                     {"flagged", payload.flagged},
                                     {"named", payload.named},
                                     {"categories", categories_json(payload.categories)},
                                     {"question", payload.question},
                                     {"followup", payload.followup}});
  open_payload_ = payload;
  withheld_text_ = response;
  return publish(TurnOutcome{OutcomeKind::RecoursePrompt, turn, {}, std::move(payload), {}});
}

TurnOutcome Session::post_decision(const filter::UserDecision& decision) {
  decision.validate();
  if (closed_) throw Error(ErrorCode::SessionClosed, "session " + id() + " is closed");

  const auto t = deps_.clock->now_us();
  if (due(t)) {
    close_at(t);
    throw Error(ErrorCode::SessionClosed, "session " + id() + " reached its time limit");
  }

  const filter::OpenPrompt* open = nullptr;
  try {
    open = &prompts_.require_open(decision.prompt_id);
  } catch (const Error& e) {
    // Resolved and expired prompts are as unknown to the caller as never-issued ones.
    throw Error(ErrorCode::UnknownPrompt, e.what());
  }

  const auto stamp = std::max(t, last_ts_ + 1);
  auto bank = word_bank_;
  const auto resolution = filter::apply_decision(bank, decision, open->flagged, stamp, open->turn);

  auto updates = nlohmann::json::array();
  for (const auto& g : open->flagged) {
    updates.push_back({{"ngram", g}, {"status", std::string(filter::to_string(bank.status(g)))}});
  }
  nlohmann::json payload = {{"turn", open->turn},
                            {"prompt_id", open->id},
                            {"a1", std::string(filter::to_string(decision.a1))},
                            {"updates", std::move(updates)}};
  if (decision.a2) payload["a2"] = std::string(filter::to_string(*decision.a2));
  emit(EventKind::UserDecision, std::move(payload), stamp);
  word_bank_ = std::move(bank);

  const auto resolved = prompts_.resolve(decision.prompt_id);
  const auto text = std::move(withheld_text_);
  withheld_text_.clear();
  open_payload_.reset();

  if (resolution == filter::Resolution::Revealed) {
    emit(EventKind::Outcome,
         {{"turn", resolved.turn}, {"kind", "shown"}, {"filter", "prompt"}, {"prompt_id", resolved.id}, {"text", text}});
    return publish(TurnOutcome{OutcomeKind::Shown, resolved.turn, text, std::nullopt, {}});
  }
  emit(EventKind::Outcome, {{"turn", resolved.turn},
                            {"kind", "default_message"},
                            {"filter", "prompt"},
                            {"reason", "declined"},
                            {"prompt_id", resolved.id},
                            {"text", record_.config.default_message}});
  return publish(TurnOutcome{OutcomeKind::DefaultMessage, resolved.turn, record_.config.default_message, std::nullopt, {}});
}

}  // namespace recourse::session

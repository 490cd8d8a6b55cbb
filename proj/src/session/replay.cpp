#include "recourse/session/replay.hpp"

#include <fstream>
#include <sstream>

#include "recourse/error.hpp"
#include "recourse/session/session.hpp"
#include "recourse/text/pipeline.hpp"

namespace recourse::session {
namespace {

filter::UserDecision make_decision(std::string prompt_id, const DecisionScript::Decide& d) {
  return filter::UserDecision{std::move(prompt_id), d.a1, d.a2};
}

DecisionScript::Decide parse_decide(const nlohmann::json& j, std::size_t line_no) {
  auto fail = [&](const std::string& what) {
    throw Error(ErrorCode::ParseError, "decision script line " + std::to_string(line_no) + ": " + what);
  };
  if (!j.contains("a1") || !j["a1"].is_string()) fail("missing a1");
  DecisionScript::Decide d;
  auto a1 = filter::view_choice_from_string(j["a1"].get<std::string>());
  if (!a1) fail("a1 must be 'view' or 'decline'");
  d.a1 = *a1;
  if (j.contains("a2") && !j["a2"].is_null()) {
    if (!j["a2"].is_string()) fail("a2 must be a string");
    auto a2 = filter::future_choice_from_string(j["a2"].get<std::string>());
    if (!a2) fail("a2 must be 'approve', 'defer' or 'block'");
    d.a2 = *a2;
  }
  try {
    make_decision("", d).validate();
  } catch (const Error& e) {
    fail(e.what());
  }
  return d;
}

}  // namespace

RecordedScorer::RecordedScorer(const SessionRecord& record) {
  for (const auto& e : record.events) {
    if (e.kind != EventKind::Scores) continue;
    const auto turn = e.payload.value("turn", std::uint64_t{0});
    if (e.payload.contains("error")) {
      failed_turns_.emplace(turn, e.payload.at("error").get<std::string>());
      continue;
    }
    for (const auto& s : e.payload.at("spans")) {
      scores_.emplace(s.at("ngram").get<std::string>(), scoring::scores_from_json(s.at("scores")));
    }
    if (e.payload.contains("whole_text")) {
      // Whole-text scores are keyed by the trimmed response of the same turn.
      for (const auto& m : record.events) {
        if (m.kind == EventKind::ModelRaw && m.payload.value("turn", std::uint64_t{0}) == turn) {
          scores_.emplace(std::string(text::trim(m.payload.at("text").get<std::string>())),
                          scoring::scores_from_json(e.payload.at("whole_text")));
        }
      }
    }
  }
}

scoring::CategoryScores RecordedScorer::score(std::string_view text) const {
  // same message as the recording, so the replayed scores event matches it
  if (auto f = failed_turns_.find(turn_); f != failed_turns_.end()) throw Error(ErrorCode::RemoteUnavailable, f->second);
  scoring::require_scorable(text);
  auto it = scores_.find(text);
  if (it == scores_.end()) {
    throw Error(ErrorCode::RemoteUnavailable, "no recorded score for '" + std::string(text) + "'");
  }
  return it->second;
}

SessionRecord replay(const SessionRecord& record, const text::StopList& stoplist) {
  model::ScriptedTranscript transcript;
  std::vector<std::int64_t> ticks{record.created_ts_us};
  for (const auto& e : record.events) {
    ticks.push_back(e.ts_us);
    if (e.kind == EventKind::ModelRaw) {
      transcript.responses.emplace_back(e.payload.at("text").get<std::string>());
    } else if (e.kind == EventKind::Outcome && e.payload.value("kind", "") == "error") {
      transcript.responses.emplace_back(std::nullopt);
    }
  }
  if (transcript.responses.empty()) transcript.responses.emplace_back(std::nullopt);

  auto scorer = std::make_shared<RecordedScorer>(record);
  SessionDeps deps{scorer, std::make_shared<model::ScriptedModel>(std::move(transcript)),
                   std::make_shared<const text::StopList>(stoplist),
                   std::make_shared<SequenceClock>(std::move(ticks)), nullptr};
  Session session(record.session_id, record.config, std::move(deps));

  for (const auto& e : record.events) {
    switch (e.kind) {
      case EventKind::UserMsg:
        scorer->set_turn(e.payload.at("turn").get<std::uint64_t>());
        try {
          session.post_user_message(e.payload.at("text").get<std::string>());
        } catch (const Error& err) {
          if (err.code() != ErrorCode::ModelUnavailable) throw;
        }
        break;
      case EventKind::UserDecision: {
        filter::UserDecision d;
        d.prompt_id = e.payload.at("prompt_id").get<std::string>();
        d.a1 = filter::view_choice_from_string(e.payload.at("a1").get<std::string>()).value();
        if (e.payload.contains("a2")) {
          d.a2 = filter::future_choice_from_string(e.payload.at("a2").get<std::string>()).value();
        }
        session.post_decision(d);
        break;
      }
      case EventKind::SessionEnd:
        session.close();
        break;
      default:
        break;
    }
  }
  return session.record();
}

DecisionScript parse_decision_script(std::string_view jsonl) {
  DecisionScript script;
  std::istringstream in{std::string(jsonl)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw Error(ErrorCode::ParseError, "decision script line " + std::to_string(line_no) + ": not a JSON object");
    }
    if (j.contains("user")) {
      if (!j["user"].is_string()) {
        throw Error(ErrorCode::ParseError, "decision script line " + std::to_string(line_no) + ": user must be a string");
      }
      script.steps.emplace_back(DecisionScript::Message{j["user"].get<std::string>()});
    } else if (j.contains("auto")) {
      script.auto_decision = parse_decide(j["auto"], line_no);
    } else {
      script.steps.emplace_back(parse_decide(j, line_no));
    }
  }
  return script;
}

DecisionScript load_decision_script(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open decision script '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_decision_script(buf.str());
}

SessionRecord replay_script(const SessionConfig& config, const DecisionScript& script,
                            const model::ScriptedTranscript& transcript,
                            std::shared_ptr<const scoring::Scorer> scorer,
                            std::shared_ptr<const text::StopList> stoplist,
                            const ScriptReplayOptions& options) {
  SessionDeps deps{std::move(scorer), std::make_shared<model::ScriptedModel>(transcript), std::move(stoplist),
                   std::make_shared<SteppingClock>(options.start_ts_us, options.tick_us), nullptr};
  Session session(options.session_id, config, std::move(deps));

  auto resolve_with = [&](const DecisionScript::Decide& d) {
    session.post_decision(make_decision(session.open_prompt()->prompt_id, d));
  };

  for (const auto& step : script.steps) {
    if (const auto* msg = std::get_if<DecisionScript::Message>(&step)) {
      if (session.open_prompt()) {
        if (!script.auto_decision) {
          throw Error(ErrorCode::PromptPending, "script sends a message while a prompt is open");
        }
        resolve_with(*script.auto_decision);
      }
      session.post_user_message(msg->text);
    } else if (session.open_prompt()) {
      resolve_with(std::get<DecisionScript::Decide>(step));
    }
  }
  if (session.open_prompt() && script.auto_decision) resolve_with(*script.auto_decision);
  session.close();
  return session.record();
}

}  // namespace recourse::session

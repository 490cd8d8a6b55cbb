#include <gtest/gtest.h>

#include "recourse/error.hpp"
#include "recourse/session/replay.hpp"
#include "recourse/session/session.hpp"
#include "support.hpp"

using namespace recourse;
using namespace recourse::session;
using recourse::fixtures::config_for;
using recourse::fixtures::events_of;
using recourse::fixtures::fixture_scorer;
using recourse::fixtures::make_scores;
using recourse::fixtures::make_session;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return ErrorCode::IoError;
}

filter::UserDecision decide(const std::string& id, filter::ViewChoice a1,
                            std::optional<filter::FutureChoice> a2 = std::nullopt) {
  filter::UserDecision d;
  d.prompt_id = id;
  d.a1 = a1;
  d.a2 = a2;
  return d;
}

std::shared_ptr<const scoring::Scorer> single(const std::string& text, scoring::CategoryScores s) {
  return std::make_shared<fixtures::MapScorer>(std::map<std::string, scoring::CategoryScores>{{text, s}});
}

}  // namespace

TEST(Session, DynamicMidBandPrompts) {
  auto s = make_session(config_for(Condition::Dynamic), single("awful", make_scores(0.50)), {"awful"});
  const auto out = s->post_user_message("hello");
  ASSERT_EQ(out.kind, OutcomeKind::RecoursePrompt);
  ASSERT_TRUE(out.prompt);
  EXPECT_EQ(out.prompt->named, (std::vector<std::string>{"awful"}));
  EXPECT_EQ(out.prompt->question,
            "The chatbot's response contains [awful], which we estimate likely falls within the following "
            "negative categories: toxicity (0.50), identity attack (0.00), insult (0.00). Would you like to see it?");
  EXPECT_EQ(out.prompt->categories.size(), 3u);
  EXPECT_EQ(out.prompt->followup,
            "After seeing The chatbot's response, should we filter responses like this in the future?");
  EXPECT_TRUE(out.text.empty());
}

TEST(Session, FixedMidBandServesDefault) {
  auto s = make_session(config_for(Condition::Fixed), single("awful", make_scores(0.50)), {"awful"});
  const auto out = s->post_user_message("hello");
  EXPECT_EQ(out.kind, OutcomeKind::DefaultMessage);
  EXPECT_EQ(out.text, "[user safe response triggered] I don't know.");
  const auto outcomes = events_of(s->record(), EventKind::Outcome);
  ASSERT_EQ(outcomes.size(), 1u);
  EXPECT_EQ(outcomes[0].payload["reason"], "threshold");
}

TEST(Session, LowScoreShown) {
  for (auto c : {Condition::Fixed, Condition::Dynamic}) {
    auto s = make_session(config_for(c), single("mild", make_scores(0.10)), {"mild"});
    const auto out = s->post_user_message("hello");
    EXPECT_EQ(out.kind, OutcomeKind::Shown);
    EXPECT_EQ(out.text, "mild");
  }
}

TEST(Session, HardMaxBlocksInDynamic) {
  auto s = make_session(config_for(Condition::Dynamic), single("vile", make_scores(0.90)), {"vile"});
  EXPECT_EQ(s->post_user_message("hi").kind, OutcomeKind::DefaultMessage);
}

TEST(Session, QuestionNamesTwoAndListsCategories) {
  auto s = make_session(config_for(Condition::Dynamic), fixture_scorer(),
                        {"stupid queer stuff"});
  const auto out = s->post_user_message("hi");
  ASSERT_EQ(out.kind, OutcomeKind::RecoursePrompt);
  EXPECT_EQ(out.prompt->named.size(), 2u);
  EXPECT_FALSE(out.prompt->categories.empty());
  EXPECT_LE(out.prompt->categories.size(), 3u);
  EXPECT_NE(out.prompt->question.find("] and ["), std::string::npos);
}

TEST(Session, PromptPendingBlocksMessages) {
  auto s = make_session(config_for(Condition::Dynamic), single("awful", make_scores(0.50)), {"awful", "x"});
  s->post_user_message("a");
  EXPECT_EQ(code_of([&] { s->post_user_message("b"); }), ErrorCode::PromptPending);
}

TEST(Session, ApproveThenRecurrenceShowsWithoutPrompt) {
  auto scorer = single("awful", make_scores(0.50));
  auto s = make_session(config_for(Condition::Dynamic), scorer, {"awful", "awful"});
  const auto p = s->post_user_message("a");
  const auto shown = s->post_decision(decide(p.prompt->prompt_id, filter::ViewChoice::View, filter::FutureChoice::Approve));
  EXPECT_EQ(shown.kind, OutcomeKind::Shown);
  EXPECT_EQ(shown.text, "awful");
  EXPECT_EQ(s->word_bank().status("awful"), filter::WordStatus::Approved);
  const auto again = s->post_user_message("b");
  EXPECT_EQ(again.kind, OutcomeKind::Shown);
  EXPECT_EQ(events_of(s->record(), EventKind::DecisionRequired).size(), 1u);
}

TEST(Session, DeclineThenRecurrenceBlocked) {
  auto s = make_session(config_for(Condition::Dynamic), single("awful", make_scores(0.50)), {"awful", "awful"});
  const auto p = s->post_user_message("a");
  const auto out = s->post_decision(decide(p.prompt->prompt_id, filter::ViewChoice::Decline));
  EXPECT_EQ(out.kind, OutcomeKind::DefaultMessage);
  EXPECT_EQ(s->word_bank().status("awful"), filter::WordStatus::Blocked);
  const auto again = s->post_user_message("b");
  EXPECT_EQ(again.kind, OutcomeKind::DefaultMessage);
  EXPECT_EQ(events_of(s->record(), EventKind::Outcome).back().payload["reason"], "word_bank_blocked");
}

TEST(Session, ViewBlockShowsOnceThenBlocks) {
  auto s = make_session(config_for(Condition::Dynamic), single("awful", make_scores(0.50)), {"awful", "awful"});
  const auto p = s->post_user_message("a");
  EXPECT_EQ(s->post_decision(decide(p.prompt->prompt_id, filter::ViewChoice::View, filter::FutureChoice::Block)).kind,
            OutcomeKind::Shown);
  EXPECT_EQ(s->post_user_message("b").kind, OutcomeKind::DefaultMessage);
}

TEST(Session, DeferAsksAgain) {
  auto s = make_session(config_for(Condition::Dynamic), single("awful", make_scores(0.50)), {"awful", "awful"});
  const auto p = s->post_user_message("a");
  s->post_decision(decide(p.prompt->prompt_id, filter::ViewChoice::View, filter::FutureChoice::Defer));
  EXPECT_EQ(s->word_bank().status("awful"), filter::WordStatus::Deferred);
  EXPECT_EQ(s->post_user_message("b").kind, OutcomeKind::RecoursePrompt);
}

TEST(Session, ResolvedAndUnknownPromptIds) {
  auto s = make_session(config_for(Condition::Dynamic), single("awful", make_scores(0.50)), {"awful"});
  const auto p = s->post_user_message("a");
  const auto id = p.prompt->prompt_id;
  EXPECT_EQ(code_of([&] { s->post_decision(decide("p999", filter::ViewChoice::Decline)); }), ErrorCode::UnknownPrompt);
  s->post_decision(decide(id, filter::ViewChoice::Decline));
  EXPECT_EQ(code_of([&] { s->post_decision(decide(id, filter::ViewChoice::Decline)); }), ErrorCode::UnknownPrompt);
  EXPECT_EQ(code_of([&] { s->post_decision(decide(id, filter::ViewChoice::View)); }), ErrorCode::InvalidInput);
}

TEST(Session, ScorerFailureFailsClosed) {
  for (auto c : {Condition::Fixed, Condition::Dynamic}) {
    auto s = make_session(config_for(c), std::make_shared<fixtures::FailingScorer>(), {"secret words here"});
    const auto out = s->post_user_message("hi");
    EXPECT_EQ(out.kind, OutcomeKind::DefaultMessage);
    EXPECT_EQ(out.text, config_for(c).default_message);
    const auto scores = events_of(s->record(), EventKind::Scores);
    ASSERT_EQ(scores.size(), 1u);
    EXPECT_TRUE(scores[0].payload.contains("error"));
    EXPECT_EQ(events_of(s->record(), EventKind::Outcome)[0].payload["reason"], "scorer_error");
  }
}

TEST(Session, ModelOutageRecordedThenRecovers) {
  auto s = make_session(config_for(Condition::Dynamic), single("fine", make_scores(0.0)), {std::nullopt, "fine"});
  EXPECT_EQ(code_of([&] { s->post_user_message("a"); }), ErrorCode::ModelUnavailable);
  const auto outcomes = events_of(s->record(), EventKind::Outcome);
  ASSERT_EQ(outcomes.size(), 1u);
  EXPECT_EQ(outcomes[0].payload["kind"], "error");
  EXPECT_EQ(s->post_user_message("b").kind, OutcomeKind::Shown);
}

TEST(Session, TimeLimitClosesAndExpiresPrompt) {
  auto cfg = config_for(Condition::Dynamic);
  cfg.time_limit_s = 1;
  auto clock = std::make_shared<SteppingClock>(0, 300'000);
  auto s = make_session(cfg, single("awful", make_scores(0.50)), {"awful", "x"}, clock);
  const auto p = s->post_user_message("a");
  ASSERT_EQ(p.kind, OutcomeKind::RecoursePrompt);
  // the clock crosses one second before the decision lands
  EXPECT_EQ(code_of([&] { s->post_decision(decide(p.prompt->prompt_id, filter::ViewChoice::Decline)); }),
            ErrorCode::SessionClosed);
  EXPECT_TRUE(s->closed());
  EXPECT_FALSE(s->open_prompt());
  const auto outcomes = events_of(s->record(), EventKind::Outcome);
  ASSERT_EQ(outcomes.size(), 1u);
  EXPECT_EQ(outcomes[0].payload["kind"], "expired");
  EXPECT_TRUE(s->record().ended());
  EXPECT_EQ(code_of([&] { s->post_user_message("b"); }), ErrorCode::SessionClosed);
}

TEST(Session, CloseIsIdempotent) {
  auto s = make_session(config_for(Condition::Dynamic), single("x", make_scores(0)), {"x"});
  s->close();
  const auto n = s->record().events.size();
  s->close();
  EXPECT_EQ(s->record().events.size(), n);
  EXPECT_EQ(events_of(s->record(), EventKind::SessionEnd).size(), 1u);
}

TEST(Session, TimestampsStrictlyIncrease) {
  auto clock = std::make_shared<SequenceClock>(std::vector<std::int64_t>{50, 10, 10, 10, 10, 10, 10, 10, 10, 10});
  auto s = make_session(config_for(Condition::Dynamic), single("awful", make_scores(0.50)), {"awful", "awful"}, clock);
  const auto p = s->post_user_message("a");
  s->post_decision(decide(p.prompt->prompt_id, filter::ViewChoice::View, filter::FutureChoice::Defer));
  s->post_user_message("b");
  s->close();
  std::int64_t last = s->record().created_ts_us;
  for (const auto& e : s->record().events) {
    EXPECT_GT(e.ts_us, last);
    last = e.ts_us;
  }
}

TEST(Session, RejectsBadMessages) {
  auto s = make_session(config_for(Condition::Dynamic), single("x", make_scores(0)), {"x"});
  EXPECT_EQ(code_of([&] { s->post_user_message("\xff\xfe"); }), ErrorCode::InvalidInput);
  EXPECT_EQ(code_of([&] { s->post_user_message("   "); }), ErrorCode::InvalidInput);
  EXPECT_TRUE(s->record().events.empty());
}

TEST(Session, ClientPayloadIsBlinded) {
  auto s = make_session(config_for(Condition::Dynamic), fixture_scorer(), {"stupid WITHHELD-MARKER"});
  const auto out = s->post_user_message("a");
  ASSERT_EQ(out.kind, OutcomeKind::RecoursePrompt);
  const auto j = to_json(out);
  const auto dumped = j.dump();
  EXPECT_EQ(dumped.find("WITHHELD-MARKER"), std::string::npos);
  EXPECT_EQ(dumped.find("condition"), std::string::npos);
  EXPECT_EQ(dumped.find("dynamic"), std::string::npos);
  EXPECT_FALSE(j.contains("text"));
}

TEST(Session, ListenersSeeEveryOutcome) {
  auto s = make_session(config_for(Condition::Dynamic), single("awful", make_scores(0.50)), {"awful", "ok"});
  std::vector<OutcomeKind> seen;
  const int token = s->subscribe([&](const TurnOutcome& o) { seen.push_back(o.kind); });
  const auto p = s->post_user_message("a");
  s->post_decision(decide(p.prompt->prompt_id, filter::ViewChoice::View, filter::FutureChoice::Defer));
  s->unsubscribe(token);
  s->post_user_message("b");
  EXPECT_EQ(seen, (std::vector<OutcomeKind>{OutcomeKind::RecoursePrompt, OutcomeKind::Shown}));
}

TEST(Session, SinkReceivesCanonicalRecord) {
  fixtures::TempDir dir;
  auto store = std::make_shared<SessionStore>(dir.path());
  auto s = make_session(config_for(Condition::Fixed), fixture_scorer(), {"you are stupid", "hello there"}, nullptr,
                        store, "sinktest");
  s->post_user_message("a");
  s->post_user_message("b");
  s->close();
  EXPECT_EQ(store->load("sinktest"), s->record());
}

TEST(Replay, ReproducesRecordByteForByte) {
  auto s = make_session(config_for(Condition::Dynamic), fixture_scorer(),
                        {"you are stupid", std::nullopt, "such a damn loser", "stupid weird", "nice day"});
  auto resolve = [&](const TurnOutcome& o, filter::ViewChoice a1, std::optional<filter::FutureChoice> a2) {
    if (o.kind == OutcomeKind::RecoursePrompt) s->post_decision(decide(o.prompt->prompt_id, a1, a2));
  };
  resolve(s->post_user_message("one"), filter::ViewChoice::View, filter::FutureChoice::Approve);
  EXPECT_THROW(s->post_user_message("two"), Error);
  resolve(s->post_user_message("three"), filter::ViewChoice::Decline, std::nullopt);
  resolve(s->post_user_message("four"), filter::ViewChoice::View, filter::FutureChoice::Defer);
  s->post_user_message("five");
  s->close();
  EXPECT_EQ(events_of(s->record(), EventKind::UserDecision).size(), 3u);
  const auto& original = s->record();
  const auto again = replay(original, *fixtures::bundled_stoplist());
  EXPECT_EQ(serialize_record(again), serialize_record(original));
}

TEST(Replay, ReproducesScorerFailures) {
  auto scorer = std::make_shared<fixtures::SwitchableScorer>(fixture_scorer());
  auto s = make_session(config_for(Condition::Dynamic), scorer, {"plain words", "stupid", "", "kind words"});
  s->post_user_message("a");
  scorer->failing = true;
  s->post_user_message("b");
  s->post_user_message("empty response");  // fails in the scorer, not on the empty text
  scorer->failing = false;
  s->post_user_message("c");
  s->close();
  EXPECT_EQ(serialize_record(replay(s->record(), *fixtures::bundled_stoplist())), serialize_record(s->record()));
}

TEST(Replay, DecisionScriptParsing) {
  const auto script = parse_decision_script(
      "{\"user\": \"hi\"}\n\n{\"a1\": \"view\", \"a2\": \"approve\"}\n{\"auto\": {\"a1\": \"decline\"}}\n");
  ASSERT_EQ(script.steps.size(), 2u);
  EXPECT_EQ(std::get<DecisionScript::Message>(script.steps[0]).text, "hi");
  EXPECT_EQ(std::get<DecisionScript::Decide>(script.steps[1]).a2, filter::FutureChoice::Approve);
  ASSERT_TRUE(script.auto_decision);
  EXPECT_EQ(script.auto_decision->a1, filter::ViewChoice::Decline);
  EXPECT_THROW(parse_decision_script("{\"bogus\": 1}\n"), Error);
  EXPECT_THROW(parse_decision_script("nope\n"), Error);
}

TEST(Replay, ScriptRunsAgainstTranscript) {
  DecisionScript script;
  script.steps.push_back(DecisionScript::Message{"hi"});
  script.steps.push_back(DecisionScript::Decide{filter::ViewChoice::View, filter::FutureChoice::Approve});
  script.steps.push_back(DecisionScript::Message{"again"});
  model::ScriptedTranscript t{{"you are stupid", "stupid"}, model::Exhaustion::Error};
  const auto r = replay_script(config_for(Condition::Dynamic), script, t, fixture_scorer(), fixtures::bundled_stoplist());
  EXPECT_TRUE(r.ended());
  EXPECT_EQ(events_of(r, EventKind::DecisionRequired).size(), 1u);
  const auto outcomes = events_of(r, EventKind::Outcome);
  ASSERT_EQ(outcomes.size(), 2u);
  EXPECT_EQ(outcomes[1].payload["kind"], "shown");

  // same input, same bytes
  const auto r2 = replay_script(config_for(Condition::Dynamic), script, t, fixture_scorer(), fixtures::bundled_stoplist());
  EXPECT_EQ(serialize_record(r2), serialize_record(r));
}

TEST(Replay, OpenPromptWithoutDecisionFails) {
  DecisionScript script;
  script.steps.push_back(DecisionScript::Message{"hi"});
  script.steps.push_back(DecisionScript::Message{"again"});
  model::ScriptedTranscript t{{"you are stupid", "fine"}, model::Exhaustion::Error};
  EXPECT_EQ(code_of([&] {
              replay_script(config_for(Condition::Dynamic), script, t, fixture_scorer(), fixtures::bundled_stoplist());
            }),
            ErrorCode::PromptPending);
  script.auto_decision = DecisionScript::Decide{filter::ViewChoice::Decline, std::nullopt};
  EXPECT_NO_THROW(
      replay_script(config_for(Condition::Dynamic), script, t, fixture_scorer(), fixtures::bundled_stoplist()));
}

#include <gtest/gtest.h>

#include <cmath>

#include "recourse/error.hpp"
#include "recourse/scoring/lexicon.hpp"
#include "recourse/scoring/perspective.hpp"
#include "support.hpp"

using namespace recourse;
using namespace recourse::scoring;
using recourse::fixtures::make_scores;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::IoError;
}

std::string row(const std::string& phrase, double tox, double insult = 0) {
  return phrase + "\t" + std::to_string(tox) + "\t0\t0\t" + std::to_string(insult) + "\t0\t0\n";
}

}  // namespace

TEST(Categories, NamesRoundTrip) {
  for (auto c : kAllCategories) EXPECT_EQ(category_from_name(name(c)), c);
  EXPECT_EQ(name(Category::SevereToxicity), "severe_toxicity");
  EXPECT_EQ(attribute_name(Category::IdentityAttack), "IDENTITY_ATTACK");
  EXPECT_FALSE(category_from_name("sexually_explicit"));
}

TEST(Categories, OverallIsToxicity) {
  auto s = make_scores(0.3, {{Category::Threat, 0.9}});
  EXPECT_DOUBLE_EQ(s.overall(), 0.3);
}

TEST(Categories, SetRejectsOutOfRange) {
  CategoryScores s;
  EXPECT_EQ(code_of([&] { s.set(Category::Insult, 1.5); }), ErrorCode::OutOfRange);
  EXPECT_EQ(code_of([&] { s.set(Category::Insult, NAN); }), ErrorCode::OutOfRange);
  s.set_clamped(Category::Insult, 1.5);
  EXPECT_EQ(s[Category::Insult], 1.0);
  s.set_clamped(Category::Insult, -2);
  EXPECT_EQ(s[Category::Insult], 0.0);
  s.set_clamped(Category::Insult, NAN);
  EXPECT_EQ(s[Category::Insult], 0.0);
}

TEST(TopCategories, TieBreakByName) {
  auto s = make_scores(0.5, {{Category::Insult, 0.5}});
  EXPECT_EQ(top_categories(s, 2),
            (std::vector<RankedCategory>{{Category::Insult, 0.5}, {Category::Toxicity, 0.5}}));
}

TEST(TopCategories, AllZeros) {
  EXPECT_EQ(top_categories({}, 3), (std::vector<RankedCategory>{{Category::IdentityAttack, 0},
                                                                 {Category::Insult, 0},
                                                                 {Category::Profanity, 0}}));
}

TEST(TopCategories, UniqueMaxAndOversizedK) {
  auto s = make_scores(0, {{Category::Threat, 0.9}});
  EXPECT_EQ(top_categories(s, 1), (std::vector<RankedCategory>{{Category::Threat, 0.9}}));
  EXPECT_EQ(top_categories(s, 10).size(), 6u);
}

TEST(CategoryScoresJson, RoundTrip) {
  auto s = make_scores(0.25, {{Category::Profanity, 0.125}});
  EXPECT_EQ(scores_from_json(to_json(s)), s);
  EXPECT_EQ(to_json(s).size(), 6u);
}

TEST(Lexicon, ParsesRows) {
  auto e = parse_lexicon("# comment\n" + row("stupid redneck", 0.8, 0.85) + "\n" + row("queer", 0.4));
  ASSERT_EQ(e.size(), 2u);
  EXPECT_EQ(e[0].phrase, "stupid redneck");
  EXPECT_DOUBLE_EQ(e[0].scores[Category::Insult], 0.85);
}

TEST(Lexicon, RejectsScoreAboveOne) {
  EXPECT_EQ(code_of([] { parse_lexicon(row("bad", 1.3)); }), ErrorCode::ParseError);
}

TEST(Lexicon, ParseErrorNamesLine) {
  try {
    parse_lexicon(row("fine", 0.1) + "broken\t0.2\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
}

TEST(Lexicon, RejectsLongOrNonCanonicalPhrase) {
  EXPECT_EQ(code_of([] { parse_lexicon(row("one two three four", 0.1)); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { parse_lexicon(row("Upper", 0.1)); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { parse_lexicon(row("two  spaces", 0.1)); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { parse_lexicon("x\tabc\t0\t0\t0\t0\t0\n"); }), ErrorCode::ParseError);
}

TEST(Lexicon, DuplicatePhrase) {
  EXPECT_EQ(code_of([] { parse_lexicon(row("same", 0.1) + row("same", 0.2)); }), ErrorCode::DuplicatePhrase);
}

TEST(Lexicon, MissingFile) {
  EXPECT_EQ(code_of([] { load_lexicon("/nonexistent/lex.tsv"); }), ErrorCode::IoError);
}

TEST(LexiconScorer, PhraseMatch) {
  LexiconScorer s(parse_lexicon(row("stupid redneck", 0.8, 0.85)));
  auto r = s.score("stupid redneck");
  EXPECT_DOUBLE_EQ(r[Category::Toxicity], 0.8);
  EXPECT_DOUBLE_EQ(r[Category::Insult], 0.85);
  EXPECT_DOUBLE_EQ(r[Category::Threat], 0.0);
}

TEST(LexiconScorer, EmptyLexiconScoresZero) {
  LexiconScorer s({});
  EXPECT_EQ(s.score("hello world"), CategoryScores{});
}

TEST(LexiconScorer, MaxOverContainedSubsequences) {
  LexiconScorer s(parse_lexicon(row("queer", 0.4) + row("queer theory", 0.2)));
  EXPECT_DOUBLE_EQ(s.score("queer theory").overall(), 0.4);
}

TEST(LexiconScorer, MatchesTokensNotSubstrings) {
  LexiconScorer s(parse_lexicon(row("kill", 0.5)));
  EXPECT_DOUBLE_EQ(s.score("skill killer").overall(), 0.0);
  EXPECT_DOUBLE_EQ(s.score("KILL!").overall(), 0.5);
}

TEST(LexiconScorer, EmptyTextIsInvalid) {
  LexiconScorer s({});
  EXPECT_EQ(code_of([&] { s.score("  \n"); }), ErrorCode::InvalidInput);
}

TEST(LexiconScorer, AgreesWithLinearScanOracle) {
  std::mt19937_64 rng(42);
  const std::vector<std::string> vocab{"a", "b", "c", "d", "e", "f"};
  for (int i = 0; i < 1000; ++i) {
    const auto lex = fixtures::random_lexicon(rng, vocab, 1 + rng() % 25);
    LexiconScorer scorer(lex);
    const auto text = fixtures::random_text(rng, vocab, 1, 10);
    ASSERT_EQ(scorer.score(text), fixtures::oracle_lexicon_score(lex, text::tokenize(text))) << text;
  }
}

TEST(CachingScorer, MemoizesAndDedups) {
  auto inner = std::make_shared<fixtures::MapScorer>(std::map<std::string, CategoryScores>{{"x y", make_scores(0.5)}});
  CachingScorer cache(inner);
  std::vector<std::string> batch{"x y", "z w", "x y"};
  auto r = cache.score_batch(batch);
  ASSERT_EQ(r.size(), 3u);
  EXPECT_DOUBLE_EQ(r[0].overall(), 0.5);
  EXPECT_DOUBLE_EQ(r[2].overall(), 0.5);
  EXPECT_EQ(inner->calls(), 2u);
  cache.score_batch(batch);
  EXPECT_EQ(inner->calls(), 2u);
  EXPECT_EQ(cache.size(), 2u);
}

TEST(CachingScorer, DoesNotCacheFailures) {
  auto inner = std::make_shared<fixtures::SwitchableScorer>(fixtures::fixture_scorer());
  CachingScorer cache(inner);
  inner->failing = true;
  EXPECT_EQ(code_of([&] { cache.score("stupid"); }), ErrorCode::RemoteUnavailable);
  EXPECT_EQ(cache.size(), 0u);
  inner->failing = false;
  EXPECT_DOUBLE_EQ(cache.score("stupid").overall(), 0.62);
}

TEST(Perspective, RequestShape) {
  const auto j = build_analyze_request("hello there");
  EXPECT_EQ(j["comment"]["text"], "hello there");
  EXPECT_EQ(j["doNotStore"], true);
  ASSERT_EQ(j["requestedAttributes"].size(), 6u);
  for (auto c : kAllCategories) EXPECT_TRUE(j["requestedAttributes"].contains(std::string(attribute_name(c))));
}

TEST(Perspective, ResponseParsedAndClamped) {
  nlohmann::json body;
  double v = 0.1;
  for (auto c : kAllCategories) {
    body["attributeScores"][std::string(attribute_name(c))]["summaryScore"]["value"] = v;
    v += 0.1;
  }
  body["attributeScores"]["THREAT"]["summaryScore"]["value"] = 1.7;
  body["attributeScores"]["TOXICITY"]["summaryScore"]["value"] = -0.2;
  const auto s = parse_analyze_response(body);
  EXPECT_DOUBLE_EQ(s[Category::Threat], 1.0);
  EXPECT_DOUBLE_EQ(s[Category::Toxicity], 0.0);
  EXPECT_DOUBLE_EQ(s[Category::Insult], 0.4);
}

TEST(Perspective, MissingAttributeIsRemoteUnavailable) {
  nlohmann::json body = {{"attributeScores", {{"TOXICITY", {{"summaryScore", {{"value", 0.2}}}}}}}};
  EXPECT_EQ(code_of([&] { parse_analyze_response(body); }), ErrorCode::RemoteUnavailable);
}

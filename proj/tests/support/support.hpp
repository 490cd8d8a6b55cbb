#pragma once

#include <atomic>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "recourse/scoring/lexicon.hpp"
#include "recourse/scoring/scorer.hpp"
#include "recourse/session/clock.hpp"
#include "recourse/session/config.hpp"
#include "recourse/session/service.hpp"
#include "recourse/session/session.hpp"
#include "recourse/text/pipeline.hpp"

namespace recourse::fixtures {

std::filesystem::path test_data(const std::string& name);

std::shared_ptr<const text::StopList> bundled_stoplist();
std::vector<scoring::LexiconEntry> fixture_lexicon();
std::shared_ptr<const scoring::Scorer> fixture_scorer();

// toxicity plus optional other categories
scoring::CategoryScores make_scores(double toxicity, std::map<scoring::Category, double> others = {});

// Exact text -> scores; unknown text scores zero.
class MapScorer final : public scoring::Scorer {
 public:
  explicit MapScorer(std::map<std::string, scoring::CategoryScores> table) : table_(table.begin(), table.end()) {}
  scoring::CategoryScores score(std::string_view text) const override;
  std::size_t calls() const { return calls_; }

 private:
  std::map<std::string, scoring::CategoryScores, std::less<>> table_;
  mutable std::atomic<std::size_t> calls_{0};
};

// Every call fails as a remote outage would.
class FailingScorer final : public scoring::Scorer {
 public:
  scoring::CategoryScores score(std::string_view text) const override;
};

// Delegates, but fails while `failing` is set.
class SwitchableScorer final : public scoring::Scorer {
 public:
  explicit SwitchableScorer(std::shared_ptr<const scoring::Scorer> inner) : inner_(std::move(inner)) {}
  scoring::CategoryScores score(std::string_view text) const override;
  mutable std::atomic<bool> failing{false};

 private:
  std::shared_ptr<const scoring::Scorer> inner_;
};

class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Lowercase word from a small alphabet, so random texts hit lexicon entries.
std::string random_word(std::mt19937_64& rng, const std::vector<std::string>& vocab);
std::string random_text(std::mt19937_64& rng, const std::vector<std::string>& vocab, std::size_t min_words,
                        std::size_t max_words);
double random_unit(std::mt19937_64& rng);

// Random lexicon of 1-3 token phrases over `vocab`, no duplicates.
std::vector<scoring::LexiconEntry> random_lexicon(std::mt19937_64& rng, const std::vector<std::string>& vocab,
                                                  std::size_t size);

// Independent reference for the lexicon matching rule: scans every entry
// against every start position of the token list.
scoring::CategoryScores oracle_lexicon_score(const std::vector<scoring::LexiconEntry>& lexicon,
                                             const text::TokenList& tokens);

// Vocabulary mixing fixture-lexicon words, neutral words and stop-words.
const std::vector<std::string>& transcript_vocab();

session::SessionConfig config_for(session::Condition c, filter::Thresholds t = {});

// In-memory session over a scripted model and a stepping clock (1 ms ticks).
std::unique_ptr<session::Session> make_session(const session::SessionConfig& cfg,
                                               std::shared_ptr<const scoring::Scorer> scorer,
                                               std::vector<std::optional<std::string>> responses,
                                               std::shared_ptr<session::Clock> clock = nullptr,
                                               std::shared_ptr<session::EventSink> sink = nullptr,
                                               std::string id = "s1");

// Service whose sessions use the fixture lexicon and an echo model, so the
// user's text is the response being filtered.
std::unique_ptr<session::SessionService> make_service(std::shared_ptr<session::SessionStore> store = nullptr,
                                                      std::shared_ptr<session::Clock> clock = nullptr,
                                                      std::int64_t time_limit_s = 600);

std::vector<session::Event> events_of(const session::SessionRecord& r, session::EventKind kind);

}  // namespace recourse::fixtures

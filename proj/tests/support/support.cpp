#include "support.hpp"

#include <sstream>

#include "recourse/data/bundled.hpp"
#include "recourse/error.hpp"

namespace recourse::fixtures {

std::filesystem::path test_data(const std::string& name) { return std::filesystem::path(RECOURSE_TEST_DATA) / name; }

std::shared_ptr<const text::StopList> bundled_stoplist() {
  static const auto list = std::make_shared<const text::StopList>(text::parse_stoplist(data::bundled_stopwords()));
  return list;
}

std::vector<scoring::LexiconEntry> fixture_lexicon() { return scoring::load_lexicon(test_data("fixture_lexicon.tsv")); }

std::shared_ptr<const scoring::Scorer> fixture_scorer() {
  static const auto scorer = std::make_shared<const scoring::LexiconScorer>(fixture_lexicon());
  return scorer;
}

scoring::CategoryScores make_scores(double toxicity, std::map<scoring::Category, double> others) {
  scoring::CategoryScores s;
  s.set(scoring::Category::Toxicity, toxicity);
  for (const auto& [c, v] : others) s.set(c, v);
  return s;
}

scoring::CategoryScores MapScorer::score(std::string_view text) const {
  scoring::require_scorable(text);
  ++calls_;
  auto it = table_.find(text);
  return it == table_.end() ? scoring::CategoryScores{} : it->second;
}

scoring::CategoryScores FailingScorer::score(std::string_view) const {
  throw Error(ErrorCode::RemoteUnavailable, "scorer stub is down");
}

scoring::CategoryScores SwitchableScorer::score(std::string_view text) const {
  if (failing) throw Error(ErrorCode::RemoteUnavailable, "scorer switched off");
  return inner_->score(text);
}

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  std::random_device rd;
  path_ = std::filesystem::temp_directory_path() /
          ("recourse-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::string random_word(std::mt19937_64& rng, const std::vector<std::string>& vocab) {
  return vocab[std::uniform_int_distribution<std::size_t>(0, vocab.size() - 1)(rng)];
}

std::string random_text(std::mt19937_64& rng, const std::vector<std::string>& vocab, std::size_t min_words,
                        std::size_t max_words) {
  static const std::vector<std::string> seps{" ", " ", " ", ", ", ". ", "! ", "? ", "  ", "\t", " - "};
  const auto n = std::uniform_int_distribution<std::size_t>(min_words, max_words)(rng);
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) out += random_word(rng, seps);
    auto w = random_word(rng, vocab);
    if (rng() % 5 == 0 && !w.empty()) w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
    out += w;
  }
  return out;
}

double random_unit(std::mt19937_64& rng) {
  // two decimals keep scores exactly comparable with hand-written values
  return static_cast<double>(std::uniform_int_distribution<int>(0, 100)(rng)) / 100.0;
}

std::vector<scoring::LexiconEntry> random_lexicon(std::mt19937_64& rng, const std::vector<std::string>& vocab,
                                                  std::size_t size) {
  std::set<std::string> used;
  std::vector<scoring::LexiconEntry> out;
  for (std::size_t attempts = 0; out.size() < size && attempts < size * 20; ++attempts) {
    const auto n = std::uniform_int_distribution<int>(1, 3)(rng);
    std::string phrase;
    for (int i = 0; i < n; ++i) phrase += (i ? " " : "") + random_word(rng, vocab);
    if (!used.insert(phrase).second) continue;
    scoring::LexiconEntry e{phrase, {}};
    for (auto c : scoring::kAllCategories) e.scores.set(c, random_unit(rng));
    out.push_back(std::move(e));
  }
  return out;
}

scoring::CategoryScores oracle_lexicon_score(const std::vector<scoring::LexiconEntry>& lexicon,
                                             const text::TokenList& tokens) {
  scoring::CategoryScores out;
  for (const auto& entry : lexicon) {
    text::TokenList phrase;
    std::istringstream words(entry.phrase);
    for (std::string w; words >> w;) phrase.push_back(w);
    bool found = false;
    for (std::size_t start = 0; !found && start + phrase.size() <= tokens.size(); ++start) {
      found = std::equal(phrase.begin(), phrase.end(), tokens.begin() + static_cast<std::ptrdiff_t>(start));
    }
    if (!found) continue;
    for (auto c : scoring::kAllCategories) {
      if (entry.scores[c] > out[c]) out.set(c, entry.scores[c]);
    }
  }
  return out;
}

const std::vector<std::string>& transcript_vocab() {
  static const std::vector<std::string> vocab{
      "stupid", "redneck", "idiot", "queer",  "theory", "damn",   "hate",  "kill",    "shut",  "up",
      "loser",  "weird",   "crazy", "dumb",   "idea",   "suck",   "go",    "away",    "now",   "trash",
      "garbage", "people", "pathetic", "identity", "culture", "music", "friends", "community", "story",
      "language", "history", "the", "a", "is", "you", "we", "and", "of", "to", "what"};
  return vocab;
}

session::SessionConfig config_for(session::Condition c, filter::Thresholds t) {
  session::SessionConfig cfg;
  cfg.condition = c;
  cfg.thresholds = t;
  return cfg;
}

std::unique_ptr<session::Session> make_session(const session::SessionConfig& cfg,
                                               std::shared_ptr<const scoring::Scorer> scorer,
                                               std::vector<std::optional<std::string>> responses,
                                               std::shared_ptr<session::Clock> clock,
                                               std::shared_ptr<session::EventSink> sink, std::string id) {
  if (!clock) clock = std::make_shared<session::SteppingClock>(0, 1000);
  auto model = std::make_shared<model::ScriptedModel>(model::ScriptedTranscript{std::move(responses), model::Exhaustion::Error});
  return std::make_unique<session::Session>(
      std::move(id), cfg, session::SessionDeps{std::move(scorer), model, bundled_stoplist(), clock, std::move(sink)});
}

std::unique_ptr<session::SessionService> make_service(std::shared_ptr<session::SessionStore> store,
                                                      std::shared_ptr<session::Clock> clock,
                                                      std::int64_t time_limit_s) {
  session::ServiceConfig cfg;
  cfg.defaults.time_limit_s = time_limit_s;
  session::ServiceDeps deps;
  deps.stoplist = bundled_stoplist();
  deps.clock = clock ? std::move(clock) : std::make_shared<session::SteppingClock>(0, 1000);
  deps.store = std::move(store);
  deps.scorer_factory = [](const session::ScorerSpec&) { return fixture_scorer(); };
  deps.model_factory = [](const session::ModelSpec&) { return std::make_shared<model::EchoModel>(); };
  return std::make_unique<session::SessionService>(cfg, deps);
}

std::vector<session::Event> events_of(const session::SessionRecord& r, session::EventKind kind) {
  std::vector<session::Event> out;
  for (const auto& e : r.events) {
    if (e.kind == kind) out.push_back(e);
  }
  return out;
}

}  // namespace recourse::fixtures

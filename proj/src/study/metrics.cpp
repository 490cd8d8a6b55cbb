#include "recourse/study/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "recourse/text/pipeline.hpp"

namespace recourse::study {

using session::EventKind;

std::size_t word_count(std::string_view text) {
  // Same whitespace set as the tokenizer; punctuation does not split words here.
  std::size_t words = 0;
  bool in_word = false;
  for (std::size_t pos = 0; pos < text.size();) {
    std::size_t next = pos + 1;
    while (next < text.size() && (static_cast<unsigned char>(text[next]) & 0xC0) == 0x80) ++next;
    const bool space = text::trim(text.substr(pos, next - pos)).empty();
    if (!space && !in_word) ++words;
    in_word = !space;
    pos = next;
  }
  return words;
}

InteractionMetrics interaction_metrics(const session::SessionRecord& record) {
  InteractionMetrics m;
  double words = 0.0, chars = 0.0;
  for (const auto& e : record.events) {
    if (e.kind != EventKind::UserMsg) continue;
    const auto text = e.payload.at("text").get<std::string>();
    ++m.interaction_count;
    words += static_cast<double>(word_count(text));
    chars += static_cast<double>(text::utf8_length(text));
  }
  if (m.interaction_count > 0) {
    m.empty = false;
    m.avg_word_count = words / static_cast<double>(m.interaction_count);
    m.avg_char_count = chars / static_cast<double>(m.interaction_count);
  }
  return m;
}

ToxicityMetrics toxicity_metrics(const session::SessionRecord& record) {
  ToxicityMetrics m;
  std::array<double, scoring::kCategoryCount> sums{};
  for (const auto& e : record.events) {
    if (e.kind == EventKind::ModelRaw) ++m.response_count;
    if (e.kind == EventKind::Outcome && e.payload.value("kind", "") == "default_message") ++m.safety_response_count;
    if (e.kind != EventKind::Scores || e.payload.contains("error")) continue;

    scoring::CategoryScores response;
    for (const auto& s : e.payload.at("spans")) response.absorb_max(scoring::scores_from_json(s.at("scores")));
    if (e.payload.contains("whole_text")) response.absorb_max(scoring::scores_from_json(e.payload.at("whole_text")));
    ++m.scored_responses;
    for (std::size_t i = 0; i < scoring::kCategoryCount; ++i) sums[i] += response[scoring::kAllCategories[i]];
  }
  if (m.scored_responses > 0) {
    for (std::size_t i = 0; i < scoring::kCategoryCount; ++i) {
      m.category_means[i] = sums[i] / static_cast<double>(m.scored_responses);
    }
  }
  return m;
}

Describe describe(std::span<const double> values) {
  Describe d;
  if (values.empty()) return d;
  const auto n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  d.mean = sum / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - d.mean) * (v - d.mean);
    d.sd = std::sqrt(ss / (n - 1.0));
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const auto mid = sorted.size() / 2;
  d.median = sorted.size() % 2 ? sorted[mid] : (sorted[mid - 1] + sorted[mid]) / 2.0;
  return d;
}

MetricsSummary summarize(const std::vector<session::SessionRecord>& records) {
  struct Columns {
    std::vector<double> interactions, words, chars, safety;
    std::array<std::vector<double>, scoring::kCategoryCount> categories;
    DecisionCounts decisions;
  };
  std::map<session::Condition, Columns> cols;
  for (const auto& r : records) {
    auto& c = cols[r.config.condition];
    const auto im = interaction_metrics(r);
    const auto tm = toxicity_metrics(r);
    c.interactions.push_back(static_cast<double>(im.interaction_count));
    c.words.push_back(im.avg_word_count);
    c.chars.push_back(im.avg_char_count);
    c.safety.push_back(static_cast<double>(tm.safety_response_count));
    if (tm.scored_responses > 0) {
      for (std::size_t i = 0; i < scoring::kCategoryCount; ++i) c.categories[i].push_back(tm.category_means[i]);
    }
    for (const auto& e : r.events) {
      if (e.kind != EventKind::UserDecision) continue;
      const auto a1 = e.payload.value("a1", "");
      const auto a2 = e.payload.value("a2", "");
      c.decisions.view += a1 == "view";
      c.decisions.decline += a1 == "decline";
      c.decisions.approve += a2 == "approve";
      c.decisions.defer += a2 == "defer";
      c.decisions.block += a2 == "block";
    }
  }
  MetricsSummary out;
  for (auto& [cond, c] : cols) {
    auto& s = out.by_condition[cond];
    s.sessions = c.interactions.size();
    s.interaction_count = describe(c.interactions);
    s.avg_word_count = describe(c.words);
    s.avg_char_count = describe(c.chars);
    s.safety_response_count = describe(c.safety);
    for (std::size_t i = 0; i < scoring::kCategoryCount; ++i) s.category_means[i] = describe(c.categories[i]);
    s.decisions = c.decisions;
  }
  return out;
}

namespace {

nlohmann::json describe_json(const Describe& d) { return {{"mean", d.mean}, {"sd", d.sd}, {"median", d.median}}; }

}  // namespace

nlohmann::json to_json(const MetricsSummary& summary) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [cond, s] : summary.by_condition) {
    nlohmann::json cats = nlohmann::json::object();
    for (std::size_t i = 0; i < scoring::kCategoryCount; ++i) {
      cats[std::string(scoring::name(scoring::kAllCategories[i]))] = describe_json(s.category_means[i]);
    }
    j[std::string(session::to_string(cond))] = {
        {"sessions", s.sessions},
        {"interaction_count", describe_json(s.interaction_count)},
        {"avg_word_count", describe_json(s.avg_word_count)},
        {"avg_char_count", describe_json(s.avg_char_count)},
        {"safety_response_count", describe_json(s.safety_response_count)},
        {"category_means", cats},
        {"decisions",
         {{"a1", {{"view", s.decisions.view}, {"decline", s.decisions.decline}}},
          {"a2", {{"approve", s.decisions.approve}, {"defer", s.decisions.defer}, {"block", s.decisions.block}}}}},
    };
  }
  return j;
}

}  // namespace recourse::study

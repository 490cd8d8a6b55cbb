#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "json.hpp"
#include "recourse/scoring/categories.hpp"
#include "recourse/session/record.hpp"

namespace recourse::study {

struct InteractionMetrics {
  std::size_t interaction_count = 0;  // user messages
  double avg_word_count = 0.0;        // whitespace-split words per user message
  double avg_char_count = 0.0;        // Unicode code points per user message
  bool empty = true;                  // no user messages: averages reported as 0
};

InteractionMetrics interaction_metrics(const session::SessionRecord& record);

struct ToxicityMetrics {
  std::size_t response_count = 0;         // raw model outputs
  std::size_t scored_responses = 0;       // outputs with a successful scores event
  std::size_t safety_response_count = 0;  // default_message outcomes served
  // Mean over scored responses of each response's per-category score (the
  // element-wise maximum over its scored n-grams, or its whole-text score).
  std::array<double, scoring::kCategoryCount> category_means{};
};

ToxicityMetrics toxicity_metrics(const session::SessionRecord& record);

// Whitespace-delimited words in raw text.
std::size_t word_count(std::string_view text);

struct Describe {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation (n - 1); 0 when n < 2
  double median = 0.0;
};

Describe describe(std::span<const double> values);

struct DecisionCounts {
  std::size_t view = 0, decline = 0;
  std::size_t approve = 0, defer = 0, block = 0;
};

struct ConditionSummary {
  std::size_t sessions = 0;
  Describe interaction_count, avg_word_count, avg_char_count, safety_response_count;
  std::array<Describe, scoring::kCategoryCount> category_means{};
  DecisionCounts decisions;
};

struct MetricsSummary {
  std::map<session::Condition, ConditionSummary> by_condition;
};

MetricsSummary summarize(const std::vector<session::SessionRecord>& records);
nlohmann::json to_json(const MetricsSummary& summary);

}  // namespace recourse::study

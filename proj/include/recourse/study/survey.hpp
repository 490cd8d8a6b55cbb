#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "recourse/session/config.hpp"
#include "recourse/study/sus.hpp"

namespace recourse::study {

using session::Condition;

// Items 1-10 are the SUS, 11-17 the control / cost-of-recourse items, and 18
// the attention check ("select 2").
struct SurveyResponse {
  std::string participant_id;
  Condition condition = Condition::Fixed;
  std::array<int, 10> sus_items{};
  std::array<int, 7> extra_items{};
  int attention_item = 0;
  std::string free_text;
};

inline constexpr int kAttentionAnswer = 2;

// CSV with header
//   participant_id,condition,item_1,...,item_18,free_text
// RFC 4180 quoting. Throws Error(ParseError) with the line number, or
// Error(OutOfRange) for ratings outside 1-5.
std::vector<SurveyResponse> parse_survey_csv(std::string_view csv);
std::vector<SurveyResponse> load_survey_csv(const std::filesystem::path& path);

// Splits records of RFC 4180 CSV into fields.
std::vector<std::vector<std::string>> parse_csv(std::string_view csv);

struct AttentionSplit {
  std::vector<SurveyResponse> kept;
  std::vector<SurveyResponse> excluded;
};

// A participant who answers the attention item with anything but 2 in any
// of their responses is excluded entirely. Input order is preserved.
AttentionSplit attention_filter(const std::vector<SurveyResponse>& responses);

struct ConditionOrder {
  Condition first;
  Condition second;
};

// Deterministic per (participant_id, seed). Numeric ids are counterbalanced
// in pairs: ids k and k+1 always receive opposite orders. Other ids get a
// seeded 64-bit hash whose low bit picks the order.
ConditionOrder assign_condition_order(std::string_view participant_id, std::uint64_t seed);

// Per-response SUS score and band, plus per-condition SUS means over
// attention-passing participants.
nlohmann::json survey_report(const std::vector<SurveyResponse>& responses, const SusBands& bands);

}  // namespace recourse::study

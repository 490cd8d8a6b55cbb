#include "recourse/study/survey.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "recourse/error.hpp"
#include "recourse/study/metrics.hpp"
#include "recourse/text/pipeline.hpp"

namespace recourse::study {
namespace {

constexpr std::size_t kColumns = 2 + 18 + 1;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

int parse_rating(const std::string& field, std::size_t line_no, std::size_t item) {
  auto t = text::trim(field);
  int v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size()) {
    throw Error(ErrorCode::ParseError, "survey line " + std::to_string(line_no) + ": item_" +
                                           std::to_string(item) + " is not an integer");
  }
  if (v < 1 || v > 5) {
    throw Error(ErrorCode::OutOfRange, "survey line " + std::to_string(line_no) + ": item_" +
                                           std::to_string(item) + " = " + std::to_string(v) + " outside 1-5");
  }
  return v;
}

}  // namespace

std::vector<std::vector<std::string>> parse_csv(std::string_view csv) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < csv.size(); ++i) {
    const char c = csv[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < csv.size() && csv[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        quoted = true;
        any = true;
        break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        any = true;
        break;
      case '\r':
        break;
      case '\n':
        if (any || !field.empty()) {
          row.push_back(std::move(field));
          rows.push_back(std::move(row));
        }
        row.clear();
        field.clear();
        any = false;
        break;
      default:
        field.push_back(c);
        any = true;
    }
  }
  if (quoted) throw Error(ErrorCode::ParseError, "unterminated quoted CSV field");
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<SurveyResponse> parse_survey_csv(std::string_view csv) {
  auto rows = parse_csv(csv);
  if (rows.empty()) throw Error(ErrorCode::ParseError, "survey CSV has no header");
  const auto& header = rows.front();
  std::vector<std::string> expected{"participant_id", "condition"};
  for (int i = 1; i <= 18; ++i) expected.push_back("item_" + std::to_string(i));
  expected.push_back("free_text");
  if (header.size() != kColumns) throw Error(ErrorCode::ParseError, "survey CSV header has wrong column count");
  for (std::size_t i = 0; i < kColumns; ++i) {
    if (text::trim(header[i]) != expected[i]) {
      throw Error(ErrorCode::ParseError, "survey CSV column " + std::to_string(i + 1) + " should be '" + expected[i] + "'");
    }
  }

  std::vector<SurveyResponse> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const auto line_no = r + 1;
    if (row.size() != kColumns) {
      throw Error(ErrorCode::ParseError, "survey line " + std::to_string(line_no) + ": expected " +
                                             std::to_string(kColumns) + " fields, got " + std::to_string(row.size()));
    }
    SurveyResponse resp;
    resp.participant_id = std::string(text::trim(row[0]));
    if (resp.participant_id.empty()) {
      throw Error(ErrorCode::ParseError, "survey line " + std::to_string(line_no) + ": empty participant_id");
    }
    auto cond = session::condition_from_string(text::trim(row[1]));
    if (!cond) throw Error(ErrorCode::ParseError, "survey line " + std::to_string(line_no) + ": bad condition");
    resp.condition = *cond;
    for (std::size_t i = 0; i < 10; ++i) resp.sus_items[i] = parse_rating(row[2 + i], line_no, i + 1);
    for (std::size_t i = 0; i < 7; ++i) resp.extra_items[i] = parse_rating(row[12 + i], line_no, i + 11);
    resp.attention_item = parse_rating(row[19], line_no, 18);
    resp.free_text = row[20];
    out.push_back(std::move(resp));
  }
  return out;
}

std::vector<SurveyResponse> load_survey_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open survey '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_survey_csv(buf.str());
}

AttentionSplit attention_filter(const std::vector<SurveyResponse>& responses) {
  std::set<std::string> failed;
  for (const auto& r : responses) {
    if (r.attention_item != kAttentionAnswer) failed.insert(r.participant_id);
  }
  AttentionSplit split;
  for (const auto& r : responses) {
    (failed.contains(r.participant_id) ? split.excluded : split.kept).push_back(r);
  }
  return split;
}

ConditionOrder assign_condition_order(std::string_view participant_id, std::uint64_t seed) {
  std::uint64_t bit;
  std::uint64_t numeric = 0;
  const bool is_numeric = !participant_id.empty() && participant_id.size() <= 18 &&
                          std::from_chars(participant_id.data(), participant_id.data() + participant_id.size(), numeric)
                                  .ptr == participant_id.data() + participant_id.size();
  if (is_numeric) {
    bit = (numeric + (splitmix64(seed) & 1)) & 1;
  } else {
    bit = splitmix64(fnv1a(participant_id) ^ splitmix64(seed)) & 1;
  }
  return bit == 0 ? ConditionOrder{Condition::Fixed, Condition::Dynamic}
                  : ConditionOrder{Condition::Dynamic, Condition::Fixed};
}

nlohmann::json survey_report(const std::vector<SurveyResponse>& responses, const SusBands& bands) {
  const auto split = attention_filter(responses);
  auto rows = nlohmann::json::array();
  std::map<Condition, std::vector<double>> by_condition;
  std::set<std::string> excluded;
  for (const auto& r : split.excluded) excluded.insert(r.participant_id);
  for (const auto& r : responses) {
    const auto score = sus_score(r.sus_items);
    const bool kept = !excluded.contains(r.participant_id);
    rows.push_back({{"participant_id", r.participant_id},
                    {"condition", std::string(session::to_string(r.condition))},
                    {"sus", score},
                    {"band", bands.classify(score)},
                    {"extra_items", r.extra_items},
                    {"attention_passed", kept}});
    if (kept) by_condition[r.condition].push_back(score);
  }
  nlohmann::json summary = nlohmann::json::object();
  for (const auto& [cond, scores] : by_condition) {
    const auto s = describe(scores);
    summary[std::string(session::to_string(cond))] = {
        {"n", scores.size()}, {"sus_mean", s.mean}, {"sus_sd", s.sd}, {"sus_median", s.median},
        {"band_of_mean", bands.classify(s.mean)}};
  }
  return {{"responses", rows},
          {"excluded_participants", std::vector<std::string>(excluded.begin(), excluded.end())},
          {"summary", summary}};
}

}  // namespace recourse::study

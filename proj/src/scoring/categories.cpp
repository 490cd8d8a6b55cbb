#include "recourse/scoring/categories.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "recourse/error.hpp"

namespace recourse::scoring {

std::string_view name(Category c) {
  switch (c) {
    case Category::Toxicity: return "toxicity";
    case Category::SevereToxicity: return "severe_toxicity";
    case Category::IdentityAttack: return "identity_attack";
    case Category::Insult: return "insult";
    case Category::Profanity: return "profanity";
    case Category::Threat: return "threat";
  }
  return "";
}

std::string_view attribute_name(Category c) {
  switch (c) {
    case Category::Toxicity: return "TOXICITY";
    case Category::SevereToxicity: return "SEVERE_TOXICITY";
    case Category::IdentityAttack: return "IDENTITY_ATTACK";
    case Category::Insult: return "INSULT";
    case Category::Profanity: return "PROFANITY";
    case Category::Threat: return "THREAT";
  }
  return "";
}

std::optional<Category> category_from_name(std::string_view snake_case) {
  for (auto c : kAllCategories) {
    if (name(c) == snake_case) return c;
  }
  return std::nullopt;
}

void CategoryScores::set(Category c, double value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw Error(ErrorCode::OutOfRange, std::string(name(c)) + " score " +
                                           std::to_string(value) + " outside [0,1]");
  }
  values_[static_cast<std::size_t>(c)] = value;
}

void CategoryScores::set_clamped(Category c, double value) {
  if (std::isnan(value)) value = 0.0;
  values_[static_cast<std::size_t>(c)] = std::clamp(value, 0.0, 1.0);
}

void CategoryScores::absorb_max(const CategoryScores& other) {
  for (std::size_t i = 0; i < kCategoryCount; ++i) {
    values_[i] = std::max(values_[i], other.values_[i]);
  }
}

std::vector<RankedCategory> top_categories(const CategoryScores& scores, std::size_t k) {
  std::vector<RankedCategory> ranked;
  ranked.reserve(kCategoryCount);
  for (auto c : kAllCategories) ranked.push_back({c, scores[c]});
  std::sort(ranked.begin(), ranked.end(), [](const RankedCategory& a, const RankedCategory& b) {
    if (a.score != b.score) return a.score > b.score;
    return name(a.category) < name(b.category);
  });
  ranked.resize(std::min(k, ranked.size()));
  return ranked;
}

nlohmann::json to_json(const CategoryScores& scores) {
  nlohmann::json j = nlohmann::json::object();
  for (auto c : kAllCategories) j[std::string(name(c))] = scores[c];
  return j;
}

CategoryScores scores_from_json(const nlohmann::json& j) {
  CategoryScores s;
  for (auto c : kAllCategories) {
    const auto key = std::string(name(c));
    if (!j.contains(key)) {
      throw Error(ErrorCode::ParseError, "missing category '" + key + "'");
    }
    s.set(c, j.at(key).get<double>());
  }
  return s;
}

}  // namespace recourse::scoring

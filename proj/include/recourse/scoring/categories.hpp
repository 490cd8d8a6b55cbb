#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

namespace recourse::scoring {

// The six attributes the scorer reports. Enumerator order is the lexicon file
// column order; it is not the tie-break order used by top_categories.
enum class Category : std::size_t {
  Toxicity = 0,
  SevereToxicity,
  IdentityAttack,
  Insult,
  Profanity,
  Threat,
};

inline constexpr std::size_t kCategoryCount = 6;

inline constexpr std::array<Category, kCategoryCount> kAllCategories{
    Category::Toxicity,  Category::SevereToxicity, Category::IdentityAttack,
    Category::Insult,    Category::Profanity,      Category::Threat,
};

// snake_case name: "toxicity", "severe_toxicity", ...
std::string_view name(Category c);
// Perspective attribute name: "TOXICITY", "SEVERE_TOXICITY", ...
std::string_view attribute_name(Category c);
std::optional<Category> category_from_name(std::string_view snake_case);

// Per-category probabilities for one text span. Always complete; values are
// kept in [0,1] by every mutating path.
class CategoryScores {
 public:
  CategoryScores() { values_.fill(0.0); }

  double operator[](Category c) const { return values_[static_cast<std::size_t>(c)]; }

  // Throws Error(OutOfRange) for values outside [0,1] or NaN.
  void set(Category c, double value);
  // Clamps into [0,1]; NaN becomes 0.
  void set_clamped(Category c, double value);

  // H(c): the `toxicity` category.
  double overall() const { return (*this)[Category::Toxicity]; }

  // Element-wise maximum.
  void absorb_max(const CategoryScores& other);

  friend bool operator==(const CategoryScores&, const CategoryScores&) = default;

 private:
  std::array<double, kCategoryCount> values_{};
};

struct RankedCategory {
  Category category;
  double score;

  friend bool operator==(const RankedCategory&, const RankedCategory&) = default;
};

// Highest k categories, descending by score, ties by ascending name. k larger
// than the category count returns all six.
std::vector<RankedCategory> top_categories(const CategoryScores& scores, std::size_t k);

nlohmann::json to_json(const CategoryScores& scores);
CategoryScores scores_from_json(const nlohmann::json& j);

}  // namespace recourse::scoring

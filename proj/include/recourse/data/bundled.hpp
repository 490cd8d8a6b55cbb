#pragma once

#include <string_view>

// Copies of the files under data/, compiled in so binaries work from any
// working directory.
namespace recourse::data {

std::string_view bundled_stopwords();
std::string_view bundled_sus_grades();

}  // namespace recourse::data

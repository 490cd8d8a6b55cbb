#include "recourse/study/sus.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "recourse/error.hpp"
#include "recourse/text/pipeline.hpp"

namespace recourse::study {

double sus_score(std::span<const int> items) {
  if (items.size() != kSusItems) {
    throw Error(ErrorCode::WrongArity, "SUS needs 10 items, got " + std::to_string(items.size()));
  }
  int sum = 0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const int r = items[i];
    if (r < 1 || r > 5) {
      throw Error(ErrorCode::OutOfRange, "SUS item " + std::to_string(i + 1) + " = " + std::to_string(r));
    }
    sum += (i % 2 == 0) ? r - 1 : 5 - r;  // item 1 is at index 0
  }
  return sum * 2.5;
}

SusBands SusBands::parse(std::string_view tsv) {
  SusBands out;
  std::istringstream in{std::string(tsv)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto t = text::trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto tab = t.find('\t');
    if (tab == std::string_view::npos) {
      throw Error(ErrorCode::ParseError, "SUS band line " + std::to_string(line_no) + ": expected two columns");
    }
    auto num = text::trim(t.substr(0, tab));
    double bound = 0;
    auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), bound);
    if (ec != std::errc{} || ptr != num.data() + num.size()) {
      throw Error(ErrorCode::ParseError, "SUS band line " + std::to_string(line_no) + ": bad bound");
    }
    auto label = std::string(text::trim(t.substr(tab + 1)));
    if (label.empty()) throw Error(ErrorCode::ParseError, "SUS band line " + std::to_string(line_no) + ": empty label");
    if (out.bands_.empty() ? bound != 0.0 : bound <= out.bands_.back().lower_bound) {
      throw Error(ErrorCode::ParseError, "SUS band bounds must start at 0 and increase");
    }
    if (bound > 100.0) throw Error(ErrorCode::ParseError, "SUS band bound above 100");
    out.bands_.push_back({bound, std::move(label)});
  }
  if (out.bands_.empty()) throw Error(ErrorCode::ParseError, "SUS band table is empty");
  return out;
}

SusBands SusBands::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open SUS band table '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

const std::string& SusBands::classify(double score) const {
  if (!(score >= 0.0 && score <= 100.0)) {
    throw Error(ErrorCode::OutOfRange, "SUS score " + std::to_string(score) + " outside [0,100]");
  }
  const SusBand* hit = &bands_.front();
  for (const auto& b : bands_) {
    if (b.lower_bound <= score) hit = &b;
  }
  return hit->label;
}

}  // namespace recourse::study

#pragma once

#include <cstddef>
#include <string>

#include "recourse/net/json_client.hpp"
#include "recourse/scoring/scorer.hpp"

namespace recourse::scoring {

struct PerspectiveOptions {
  std::string endpoint;  // full AnalyzeComment URL
  std::string api_key;   // appended as ?key=...; may be empty for local stand-ins
  net::RetryPolicy retry{};
  std::size_t max_in_flight = 4;
};

// AnalyzeComment request body for all six attributes, with doNotStore set.
nlohmann::json build_analyze_request(std::string_view text);

// Reads attributeScores.<ATTR>.summaryScore.value for every attribute and
// clamps into [0,1]. Throws Error(RemoteUnavailable) if any is missing.
CategoryScores parse_analyze_response(const nlohmann::json& body);

// Remote scorer speaking the Perspective AnalyzeComment wire format.
class PerspectiveScorer final : public Scorer {
 public:
  explicit PerspectiveScorer(PerspectiveOptions options);

  CategoryScores score(std::string_view text) const override;

  // Scores with at most `max_in_flight` concurrent requests.
  std::vector<CategoryScores> score_batch(std::span<const std::string> texts) const override;

 private:
  PerspectiveOptions options_;
  net::Endpoint endpoint_;
};

}  // namespace recourse::scoring

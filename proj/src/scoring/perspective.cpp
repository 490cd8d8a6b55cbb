#include "recourse/scoring/perspective.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "recourse/error.hpp"

namespace recourse::scoring {

nlohmann::json build_analyze_request(std::string_view text) {
  nlohmann::json attrs = nlohmann::json::object();
  for (auto c : kAllCategories) attrs[std::string(attribute_name(c))] = nlohmann::json::object();
  return {
      {"comment", {{"text", std::string(text)}}},
      {"requestedAttributes", attrs},
      {"doNotStore", true},
  };
}

CategoryScores parse_analyze_response(const nlohmann::json& body) {
  CategoryScores scores;
  for (auto c : kAllCategories) {
    const auto attr = std::string(attribute_name(c));
    const auto ptr = nlohmann::json::json_pointer("/attributeScores/" + attr + "/summaryScore/value");
    if (!body.contains(ptr) || !body.at(ptr).is_number()) {
      throw Error(ErrorCode::RemoteUnavailable, "response lacks a score for " + attr);
    }
    scores.set_clamped(c, body.at(ptr).get<double>());
  }
  return scores;
}

PerspectiveScorer::PerspectiveScorer(PerspectiveOptions options)
    : options_(std::move(options)), endpoint_(net::parse_endpoint(options_.endpoint)) {
  if (!options_.api_key.empty()) {
    endpoint_.path += (endpoint_.path.find('?') == std::string::npos ? "?key=" : "&key=");
    endpoint_.path += options_.api_key;
  }
  options_.max_in_flight = std::max<std::size_t>(1, options_.max_in_flight);
}

CategoryScores PerspectiveScorer::score(std::string_view text) const {
  require_scorable(text);
  auto res = net::post_json(endpoint_, build_analyze_request(text), {}, options_.retry);
  if (!res.ok) throw Error(ErrorCode::RemoteUnavailable, "scorer unavailable: " + res.detail);
  return parse_analyze_response(res.body);
}

std::vector<CategoryScores> PerspectiveScorer::score_batch(std::span<const std::string> texts) const {
  for (const auto& t : texts) require_scorable(t);
  std::vector<CategoryScores> out(texts.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mu;

  auto worker = [&] {
    while (!failed.load()) {
      const auto i = next.fetch_add(1);
      if (i >= texts.size()) return;
      try {
        out[i] = score(texts[i]);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!first_error) first_error = std::current_exception();
        failed = true;
      }
    }
  };

  const auto workers = std::min(options_.max_in_flight, texts.size());
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
  pool.clear();  // joins
  if (first_error) std::rethrow_exception(first_error);
  return out;
}

}  // namespace recourse::scoring

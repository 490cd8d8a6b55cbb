#pragma once

#include <chrono>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace recourse::net {

// "https://host:8443/v1/path?x=1" -> {"https://host:8443", "/v1/path?x=1"}.
struct Endpoint {
  std::string origin;
  std::string path;
};

// Throws Error(InvalidConfig) for URLs without an http(s) scheme or host.
Endpoint parse_endpoint(const std::string& url);

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds timeout{5000};
  std::chrono::milliseconds backoff{100};  // doubled after each failed attempt
};

// Outcome of a JSON POST. `ok` is false when every attempt failed; `detail`
// then describes the last failure.
struct PostResult {
  bool ok = false;
  int status = 0;
  nlohmann::json body;
  std::string detail;
};

// POSTs a JSON body. Connection failures, 429 and 5xx are retried with
// exponential backoff; other 4xx responses and unparseable bodies are final.
PostResult post_json(const Endpoint& endpoint, const nlohmann::json& body,
                     const std::vector<std::pair<std::string, std::string>>& headers,
                     const RetryPolicy& policy);

}  // namespace recourse::net

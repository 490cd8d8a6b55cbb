#include "recourse/net/json_client.hpp"

#include <thread>

#include "httplib.h"
#include "recourse/error.hpp"

namespace recourse::net {

Endpoint parse_endpoint(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::InvalidConfig, "endpoint '" + url + "' has no scheme");
  }
  const auto scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw Error(ErrorCode::InvalidConfig, "unsupported scheme '" + scheme + "'");
  }
  const auto host_start = scheme_end + 3;
  const auto path_start = url.find_first_of("/?", host_start);
  Endpoint ep;
  ep.origin = url.substr(0, path_start);
  if (ep.origin.size() <= host_start) {
    throw Error(ErrorCode::InvalidConfig, "endpoint '" + url + "' has no host");
  }
  ep.path = path_start == std::string::npos ? "/" : url.substr(path_start);
  if (ep.path.front() == '?') ep.path.insert(ep.path.begin(), '/');
  return ep;
}

PostResult post_json(const Endpoint& endpoint, const nlohmann::json& body,
                     const std::vector<std::pair<std::string, std::string>>& headers,
                     const RetryPolicy& policy) {
  httplib::Client client(endpoint.origin);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(policy.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(policy.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  httplib::Headers hdrs;
  for (const auto& [k, v] : headers) hdrs.emplace(k, v);
  const auto payload = body.dump();

  PostResult result;
  auto delay = policy.backoff;
  for (int attempt = 1; attempt <= std::max(1, policy.max_attempts); ++attempt) {
    if (attempt > 1) {
      std::this_thread::sleep_for(delay);
      delay *= 2;
    }
    auto res = client.Post(endpoint.path, hdrs, payload, "application/json");
    if (!res) {
      result.detail = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    result.status = res->status;
    if (res->status == 429 || res->status >= 500) {
      result.detail = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status < 200 || res->status >= 300) {
      result.detail = "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200);
      return result;
    }
    auto parsed = nlohmann::json::parse(res->body, nullptr, /*allow_exceptions=*/false);
    if (parsed.is_discarded()) {
      result.detail = "response is not JSON";
      return result;
    }
    result.ok = true;
    result.body = std::move(parsed);
    result.detail.clear();
    return result;
  }
  return result;
}

}  // namespace recourse::net

// Remote scorer and chat clients against in-process HTTP stubs.
#include <gtest/gtest.h>

#include <atomic>
#include <thread>

#include "httplib.h"
#include "recourse/error.hpp"
#include "recourse/model/gateway.hpp"
#include "recourse/net/json_client.hpp"
#include "recourse/scoring/perspective.hpp"

using namespace recourse;
using nlohmann::json;

namespace {

class StubServer {
 public:
  StubServer() = default;
  ~StubServer() {
    server.stop();
    if (thread_.joinable()) thread_.join();
  }
  void start() {
    port = server.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  std::string url(const std::string& path) const { return "http://127.0.0.1:" + std::to_string(port) + path; }

  httplib::Server server;
  int port = 0;

 private:
  std::thread thread_;
};

net::RetryPolicy fast_retry() { return {.max_attempts = 3, .timeout = std::chrono::milliseconds(2000), .backoff = std::chrono::milliseconds(1)}; }

json analyze_reply(double toxicity) {
  json body;
  for (auto c : scoring::kAllCategories) {
    body["attributeScores"][std::string(scoring::attribute_name(c))]["summaryScore"]["value"] =
        c == scoring::Category::Toxicity ? toxicity : 0.05;
  }
  return body;
}

}  // namespace

TEST(Endpoint, Parses) {
  auto e = net::parse_endpoint("https://host:8443/v1/x?y=1");
  EXPECT_EQ(e.origin, "https://host:8443");
  EXPECT_EQ(e.path, "/v1/x?y=1");
  EXPECT_EQ(net::parse_endpoint("http://h").path, "/");
  EXPECT_THROW(net::parse_endpoint("ftp://h/x"), Error);
  EXPECT_THROW(net::parse_endpoint("no-scheme"), Error);
}

TEST(PerspectiveClient, SendsWireFormatAndKey) {
  StubServer stub;
  std::string seen_key;
  json seen_body;
  std::mutex mu;
  stub.server.Post("/v1alpha1/comments:analyze", [&](const httplib::Request& req, httplib::Response& res) {
    std::lock_guard lock(mu);
    seen_key = req.get_param_value("key");
    seen_body = json::parse(req.body);
    res.set_content(analyze_reply(0.42).dump(), "application/json");
  });
  stub.start();
  scoring::PerspectiveScorer scorer({.endpoint = stub.url("/v1alpha1/comments:analyze"), .api_key = "k123", .retry = fast_retry()});
  const auto s = scorer.score("queer theory");
  EXPECT_DOUBLE_EQ(s.overall(), 0.42);
  EXPECT_EQ(seen_key, "k123");
  EXPECT_EQ(seen_body["comment"]["text"], "queer theory");
  EXPECT_EQ(seen_body["doNotStore"], true);
}

TEST(PerspectiveClient, RetriesServerErrorsThenSucceeds) {
  StubServer stub;
  std::atomic<int> calls{0};
  stub.server.Post("/a", [&](const httplib::Request&, httplib::Response& res) {
    if (++calls < 3) {
      res.status = calls == 1 ? 503 : 429;
      return;
    }
    res.set_content(analyze_reply(1.4).dump(), "application/json");
  });
  stub.start();
  scoring::PerspectiveScorer scorer({.endpoint = stub.url("/a"), .retry = fast_retry()});
  EXPECT_DOUBLE_EQ(scorer.score("x").overall(), 1.0);  // clamped
  EXPECT_EQ(calls.load(), 3);
}

TEST(PerspectiveClient, GivesUpAfterBoundedRetries) {
  StubServer stub;
  std::atomic<int> calls{0};
  stub.server.Post("/a", [&](const httplib::Request&, httplib::Response& res) {
    ++calls;
    res.status = 500;
  });
  stub.start();
  scoring::PerspectiveScorer scorer({.endpoint = stub.url("/a"), .retry = fast_retry()});
  try {
    scorer.score("x");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RemoteUnavailable);
  }
  EXPECT_EQ(calls.load(), 3);
}

TEST(PerspectiveClient, ClientErrorIsNotRetried) {
  StubServer stub;
  std::atomic<int> calls{0};
  stub.server.Post("/a", [&](const httplib::Request&, httplib::Response& res) {
    ++calls;
    res.status = 400;
  });
  stub.start();
  scoring::PerspectiveScorer scorer({.endpoint = stub.url("/a"), .retry = fast_retry()});
  EXPECT_THROW(scorer.score("x"), Error);
  EXPECT_EQ(calls.load(), 1);
}

TEST(PerspectiveClient, UnreachableHostIsRemoteUnavailable) {
  int port;
  {
    httplib::Server probe;
    port = probe.bind_to_any_port("127.0.0.1");
  }
  scoring::PerspectiveScorer scorer({.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/a", .retry = fast_retry()});
  try {
    scorer.score("x");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RemoteUnavailable);
  }
}

TEST(PerspectiveClient, BatchKeepsOrderAndBoundsConcurrency) {
  StubServer stub;
  std::atomic<int> in_flight{0}, peak{0};
  stub.server.new_task_queue = [] { return new httplib::ThreadPool(16); };
  stub.server.Post("/a", [&](const httplib::Request& req, httplib::Response& res) {
    const int now = ++in_flight;
    int p = peak.load();
    while (now > p && !peak.compare_exchange_weak(p, now)) {
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
    const auto text = json::parse(req.body)["comment"]["text"].get<std::string>();
    res.set_content(analyze_reply(std::stoi(text) / 100.0).dump(), "application/json");
    --in_flight;
  });
  stub.start();
  scoring::PerspectiveScorer scorer({.endpoint = stub.url("/a"), .retry = fast_retry(), .max_in_flight = 4});
  std::vector<std::string> texts;
  for (int i = 0; i < 20; ++i) texts.push_back(std::to_string(i));
  const auto out = scorer.score_batch(texts);
  ASSERT_EQ(out.size(), 20u);
  for (int i = 0; i < 20; ++i) EXPECT_DOUBLE_EQ(out[i].overall(), i / 100.0);
  EXPECT_LE(peak.load(), 4);
  EXPECT_GE(peak.load(), 2);
}

TEST(RemoteChat, RequestCarriesSystemPromptAndWindow) {
  std::vector<model::ChatTurn> history;
  for (int i = 0; i < 10; ++i) {
    history.push_back({i % 2 ? model::Role::Model : model::Role::User, "t" + std::to_string(i), i});
  }
  history.push_back({model::Role::User, "last", 99});
  model::RemoteChatOptions opts{.endpoint = "http://x", .system_prompt = "be kind", .max_history_turns = 3};
  const auto j = build_chat_request(history, opts);
  EXPECT_EQ(j["system"], "be kind");
  ASSERT_EQ(j["messages"].size(), 3u);
  EXPECT_EQ(j["messages"][2]["text"], "last");
  EXPECT_EQ(j["messages"][2]["role"], "user");
  EXPECT_EQ(j["messages"][1]["role"], "model");
}

TEST(RemoteChat, RoundTripWithBearerToken) {
  StubServer stub;
  std::string auth;
  stub.server.Post("/chat", [&](const httplib::Request& req, httplib::Response& res) {
    auth = req.get_header_value("Authorization");
    const auto j = json::parse(req.body);
    res.set_content(json{{"text", "re: " + j["messages"].back()["text"].get<std::string>()}}.dump(), "application/json");
  });
  stub.start();
  model::RemoteChatModel m({.endpoint = stub.url("/chat"), .auth_token = "tok", .retry = fast_retry()});
  std::vector<model::ChatTurn> h{{model::Role::User, "hi", 0}};
  EXPECT_EQ(m.respond(h), "re: hi");
  EXPECT_EQ(auth, "Bearer tok");
}

TEST(RemoteChat, FailuresAreModelUnavailable) {
  StubServer stub;
  stub.server.Post("/chat", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"text": ""})", "application/json");
  });
  stub.server.Post("/down", [](const httplib::Request&, httplib::Response& res) { res.status = 502; });
  stub.start();
  std::vector<model::ChatTurn> h{{model::Role::User, "hi", 0}};
  for (const char* path : {"/chat", "/down"}) {
    model::RemoteChatModel m({.endpoint = stub.url(path), .retry = fast_retry()});
    try {
      m.respond(h);
      ADD_FAILURE() << path;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::ModelUnavailable) << path;
    }
  }
}

#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <string>

#include "recourse/session/service.hpp"

namespace recourse::server {

struct ServerOptions {
  std::string address = "127.0.0.1";
  std::uint16_t port = 8080;  // 0 picks a free port
  int threads = 4;            // handlers block on model and scorer calls
  std::chrono::milliseconds sweep_interval{1000};
};

// HTTP API plus WebSocket /v1/sessions/{id}/stream, which pushes every
// TurnOutcome of that session as a JSON text frame.
class HttpServer {
 public:
  HttpServer(session::SessionService& service, ServerOptions options);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Binds and starts the worker threads. Throws Error(IoError) if the
  // address cannot be bound.
  void start();
  void stop();
  // Blocks until stop() is called from another thread or a signal handler.
  void wait();

  std::uint16_t port() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace recourse::server

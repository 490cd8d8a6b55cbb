#include "recourse/server/http_server.hpp"

#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/steady_timer.hpp>
#include <boost/asio/strand.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <thread>
#include <vector>

#include "recourse/server/router.hpp"

namespace recourse::server {
namespace {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

constexpr auto kIdleTimeout = std::chrono::seconds(60);
constexpr std::size_t kBodyLimit = 1 << 20;

std::string_view sv(beast::string_view s) { return {s.data(), s.size()}; }

http::response<http::string_body> make_response(const http::request<http::string_body>& req, int status,
                                                const nlohmann::json& body) {
  http::response<http::string_body> res{static_cast<http::status>(status), req.version()};
  res.set(http::field::content_type, "application/json");
  res.keep_alive(req.keep_alive());
  res.body() = body.dump();
  res.prepare_payload();
  return res;
}

class WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(tcp::socket&& socket, session::SessionService& service, std::string id, int token)
      : ws_(std::move(socket)), service_(service), id_(std::move(id)), token_(token) {}

  void run(http::request<http::string_body> req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, beast::bind_front_handler(&WsSession::on_accept, shared_from_this()));
  }

  // Called from any thread.
  void send(std::string message) {
    net::post(ws_.get_executor(), [self = shared_from_this(), m = std::move(message)]() mutable {
      self->queue_.push_back(std::move(m));
      if (self->open_ && self->queue_.size() == 1) self->write_next();
    });
  }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) return finish();
    open_ = true;
    if (!queue_.empty()) write_next();
    read_next();
  }

  void read_next() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return self->finish();
      self->buffer_.consume(self->buffer_.size());  // client frames are ignored
      self->read_next();
    });
  }

  void write_next() {
    ws_.text(true);
    ws_.async_write(net::buffer(queue_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return self->finish();
      self->queue_.pop_front();
      if (!self->queue_.empty()) self->write_next();
    });
  }

  void finish() {
    open_ = false;
    queue_.clear();
    if (token_ != 0) {
      service_.unsubscribe(id_, token_);
      token_ = 0;
    }
  }

  websocket::stream<beast::tcp_stream> ws_;
  session::SessionService& service_;
  std::string id_;
  int token_;
  beast::flat_buffer buffer_;
  std::deque<std::string> queue_;
  bool open_ = false;
};

// Forwards outcomes to a socket that may not exist yet or may be gone.
struct Relay {
  std::mutex mu;
  std::weak_ptr<WsSession> target;
};

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket&& socket, session::SessionService& service, const Router& router)
      : stream_(std::move(socket)), service_(service), router_(router) {}

  void run() {
    net::dispatch(stream_.get_executor(), beast::bind_front_handler(&HttpSession::read_next, shared_from_this()));
  }

 private:
  void read_next() {
    parser_.emplace();
    parser_->body_limit(kBodyLimit);
    stream_.expires_after(kIdleTimeout);
    http::async_read(stream_, buffer_, *parser_, beast::bind_front_handler(&HttpSession::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec == http::error::end_of_stream) {
      stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
      return;
    }
    if (ec) return;
    auto req = parser_->release();

    if (websocket::is_upgrade(req)) {
      if (auto id = Router::stream_session(sv(req.target()))) return upgrade(std::move(req), *id);
      return reply(make_response(req, 404, error_body(ErrorCode::NotFound, "no WebSocket route")));
    }
    const auto api = router_.handle(sv(req.method_string()), sv(req.target()), req.body());
    reply(make_response(req, api.status, api.body));
  }

  void upgrade(http::request<http::string_body> req, const std::string& id) {
    auto relay = std::make_shared<Relay>();
    int token = 0;
    try {
      token = service_.subscribe(id, [relay](const session::TurnOutcome& o) {
        std::lock_guard lock(relay->mu);
        if (auto ws = relay->target.lock()) ws->send(session::to_json(o).dump());
      });
    } catch (const Error& e) {
      return reply(make_response(req, http_status(e.code()), error_body(e.code(), e.what())));
    }
    stream_.expires_never();
    auto ws = std::make_shared<WsSession>(stream_.release_socket(), service_, id, token);
    {
      std::lock_guard lock(relay->mu);
      relay->target = ws;
    }
    ws->run(std::move(req));
  }

  void reply(http::response<http::string_body> res) {
    auto sp = std::make_shared<http::response<http::string_body>>(std::move(res));
    http::async_write(stream_, *sp, [self = shared_from_this(), sp](beast::error_code ec, std::size_t) {
      if (ec) return;
      if (sp->need_eof()) {
        self->stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
        return;
      }
      self->read_next();
    });
  }

  beast::tcp_stream stream_;
  session::SessionService& service_;
  const Router& router_;
  beast::flat_buffer buffer_;
  std::optional<http::request_parser<http::string_body>> parser_;
};

}  // namespace

struct HttpServer::Impl {
  Impl(session::SessionService& s, ServerOptions o)
      : service(s), options(std::move(o)), router(s), ioc(std::max(1, options.threads)), acceptor(ioc), sweeper(ioc) {}

  void accept_next() {
    acceptor.async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
      if (ec == net::error::operation_aborted) return;
      if (!ec) std::make_shared<HttpSession>(std::move(socket), service, router)->run();
      accept_next();
    });
  }

  void schedule_sweep() {
    sweeper.expires_after(options.sweep_interval);
    sweeper.async_wait([this](beast::error_code ec) {
      if (ec) return;
      service.sweep_expired();
      schedule_sweep();
    });
  }

  session::SessionService& service;
  ServerOptions options;
  Router router;
  net::io_context ioc;
  tcp::acceptor acceptor;
  net::steady_timer sweeper;
  std::vector<std::thread> threads;
  std::mutex mu;
  std::condition_variable cv;
  bool running = false;
};

HttpServer::HttpServer(session::SessionService& service, ServerOptions options)
    : impl_(std::make_unique<Impl>(service, std::move(options))) {}

HttpServer::~HttpServer() { stop(); }

void HttpServer::start() {
  auto& im = *impl_;
  beast::error_code ec;
  const auto address = net::ip::make_address(im.options.address, ec);
  if (ec) throw Error(ErrorCode::InvalidConfig, "bad listen address '" + im.options.address + "'");
  const tcp::endpoint endpoint{address, im.options.port};
  im.acceptor.open(endpoint.protocol(), ec);
  if (!ec) im.acceptor.set_option(net::socket_base::reuse_address(true), ec);
  if (!ec) im.acceptor.bind(endpoint, ec);
  if (!ec) im.acceptor.listen(net::socket_base::max_listen_connections, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot listen on " + im.options.address + ":" +
                                              std::to_string(im.options.port) + ": " + ec.message());
  im.accept_next();
  im.schedule_sweep();
  {
    std::lock_guard lock(im.mu);
    im.running = true;
  }
  for (int i = 0; i < std::max(1, im.options.threads); ++i) im.threads.emplace_back([&im] { im.ioc.run(); });
}

void HttpServer::stop() {
  auto& im = *impl_;
  {
    std::lock_guard lock(im.mu);
    if (!im.running) return;
    im.running = false;
  }
  net::post(im.ioc, [&im] {
    beast::error_code ignored;
    im.acceptor.close(ignored);
    im.sweeper.cancel();
  });
  im.ioc.stop();
  for (auto& t : im.threads) {
    if (t.joinable() && t.get_id() != std::this_thread::get_id()) t.join();
  }
  im.threads.clear();
  im.cv.notify_all();
}

void HttpServer::wait() {
  auto& im = *impl_;
  std::unique_lock lock(im.mu);
  im.cv.wait(lock, [&im] { return !im.running; });
}

std::uint16_t HttpServer::port() const {
  beast::error_code ec;
  const auto ep = impl_->acceptor.local_endpoint(ec);
  return ec ? impl_->options.port : ep.port();
}

}  // namespace recourse::server

#include "aav/server.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <deque>
#include <thread>
#include <vector>

#include <boost/asio/signal_set.hpp>
#include <boost/asio/steady_timer.hpp>
#include <boost/asio/strand.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "aav/error.hpp"

namespace aav {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

ServerOptions server_options_from_env(ServerOptions base) {
  if (const char* port = std::getenv("AAV_PORT"); port && *port) base.port = static_cast<unsigned short>(std::stoi(port));
  if (const char* tick = std::getenv("AAV_TICK_MS"); tick && *tick) base.tick_ms = std::stoll(tick);
  return base;
}

namespace {

class WsPeer : public Peer, public std::enable_shared_from_this<WsPeer> {
 public:
  WsPeer(tcp::socket&& socket, SessionHub& hub) : ws_(std::move(socket)), hub_(hub) {}

  void start(http::request<http::string_body> req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.text(true);
    ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) {
      if (ec) return;
      self->conn_ = std::make_unique<Connection>(self->hub_, self);
      self->read();
    });
  }

  void send(std::shared_ptr<const std::string> message) override {
    ++pending_;
    net::post(ws_.get_executor(), [self = shared_from_this(), message = std::move(message)]() mutable {
      if (self->closing_) {
        --self->pending_;
        return;
      }
      self->queue_.push_back(std::move(message));
      if (self->queue_.size() == 1) self->write();
    });
  }

  void close() override {
    net::post(ws_.get_executor(), [self = shared_from_this()] {
      if (self->closing_) return;
      self->closing_ = true;
      if (self->queue_.empty()) self->shutdown();
    });
  }

  std::size_t pending() const override { return pending_.load(); }

 private:
  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec || !self->conn_) return self->finish();
      const std::string text = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      self->conn_->on_message(text);
      if (self->conn_->state() == Connection::State::Closed) return;
      self->read();
    });
  }

  void write() {
    ws_.async_write(net::buffer(*queue_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      self->queue_.pop_front();
      --self->pending_;
      if (ec) {
        self->closing_ = true;
        self->pending_ -= self->queue_.size();
        self->queue_.clear();
        return;
      }
      if (!self->queue_.empty()) return self->write();
      if (self->closing_) self->shutdown();
    });
  }

  void shutdown() {
    ws_.async_close(websocket::close_code::normal, [self = shared_from_this()](beast::error_code) { self->finish(); });
  }

  // Ends the protocol side and breaks the Connection -> Peer ownership cycle.
  void finish() {
    if (!conn_) return;
    conn_->on_close();
    net::post(ws_.get_executor(), [self = shared_from_this()] { self->conn_.reset(); });
  }

  websocket::stream<beast::tcp_stream> ws_;
  SessionHub& hub_;
  std::unique_ptr<Connection> conn_;
  beast::flat_buffer buffer_;
  std::deque<std::shared_ptr<const std::string>> queue_;
  std::atomic<std::size_t> pending_{0};
  bool closing_ = false;
};

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket&& socket, SessionHub& hub) : stream_(std::move(socket)), hub_(hub) {}

  void run() {
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, req_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (!ec) self->dispatch();
    });
  }

 private:
  void dispatch() {
    const std::string target(req_.target());
    const std::string path = target.substr(0, target.find('?'));
    if (websocket::is_upgrade(req_)) {
      if (path == "/session") {
        stream_.expires_never();
        std::make_shared<WsPeer>(stream_.release_socket(), hub_)->start(std::move(req_));
        return;
      }
      return respond(http::status::not_found, "not found\n");
    }
    if (req_.method() == http::verb::get && path == "/healthz") return respond(http::status::ok, "ok");
    respond(http::status::not_found, "not found\n");
  }

  void respond(http::status status, std::string body) {
    auto res = std::make_shared<http::response<http::string_body>>(status, req_.version());
    res->set(http::field::content_type, "text/plain");
    res->keep_alive(false);
    res->body() = std::move(body);
    res->prepare_payload();
    http::async_write(stream_, *res, [self = shared_from_this(), res](beast::error_code, std::size_t) {
      beast::error_code ignored;
      self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
    });
  }

  beast::tcp_stream stream_;
  SessionHub& hub_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
};

// Fires a session's ticks on deadlines start + k * tick_ms of the steady
// clock, so late wake-ups do not accumulate drift.
class Ticker : public std::enable_shared_from_this<Ticker> {
 public:
  Ticker(net::io_context& ioc, std::weak_ptr<LiveSession> session, std::chrono::milliseconds period)
      : timer_(net::make_strand(ioc)),
        session_(std::move(session)),
        period_(period),
        start_(std::chrono::steady_clock::now()) {}

  void arm() {
    timer_.expires_at(start_ + period_ * (fired_ + 1));
    timer_.async_wait([self = shared_from_this()](beast::error_code ec) {
      if (ec) return;
      auto s = self->session_.lock();
      if (!s || s->finished()) return;
      s->tick();
      ++self->fired_;
      self->arm();
    });
  }

 private:
  net::steady_timer timer_;
  std::weak_ptr<LiveSession> session_;
  std::chrono::milliseconds period_;
  std::chrono::steady_clock::time_point start_;
  std::int64_t fired_ = 0;
};

}  // namespace

struct Server::Impl {
  explicit Impl(ServerOptions opts)
      : options(std::move(opts)),
        hub(HubOptions{options.tick_ms, options.log_dir, options.max_pending}),
        acceptor(net::make_strand(ioc)),
        signals(ioc) {}

  void accept() {
    acceptor.async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;
      std::make_shared<HttpSession>(std::move(socket), hub)->run();
      accept();
    });
  }

  ServerOptions options;
  net::io_context ioc;
  SessionHub hub;
  tcp::acceptor acceptor;
  net::signal_set signals;
  std::vector<std::thread> workers;
  std::mutex mu;
  std::condition_variable cv;
  bool stopped = false;
  bool started = false;
};

Server::Server(ServerOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {
  impl_->hub.on_created = [this](const std::shared_ptr<LiveSession>& s) {
    std::make_shared<Ticker>(impl_->ioc, s, std::chrono::milliseconds(s->tick_ms()))->arm();
  };
}

Server::~Server() { stop(); }

SessionHub& Server::hub() { return impl_->hub; }

unsigned short Server::start() {
  auto& im = *impl_;
  beast::error_code ec;
  const auto address = net::ip::make_address(im.options.address, ec);
  if (ec) fail(ErrorCode::InvalidArgument, "bad listen address '" + im.options.address + "'");
  const tcp::endpoint endpoint(address, im.options.port);
  im.acceptor.open(endpoint.protocol(), ec);
  if (!ec) im.acceptor.set_option(net::socket_base::reuse_address(true), ec);
  if (!ec) im.acceptor.bind(endpoint, ec);
  if (!ec) im.acceptor.listen(net::socket_base::max_listen_connections, ec);
  if (ec) fail(ErrorCode::Io, "cannot listen on " + im.options.address + ":" + std::to_string(im.options.port) + ": " + ec.message());
  const unsigned short port = im.acceptor.local_endpoint().port();

  if (im.options.handle_signals) {
    im.signals.add(SIGINT);
    im.signals.add(SIGTERM);
    im.signals.async_wait([this](beast::error_code ec, int) {
      if (ec) return;
      std::lock_guard lock(impl_->mu);
      impl_->stopped = true;
      impl_->cv.notify_all();
    });
  }
  im.accept();
  im.started = true;
  for (int i = 0; i < std::max(1, im.options.threads); ++i) im.workers.emplace_back([&im] { im.ioc.run(); });
  return port;
}

void Server::wait() {
  std::unique_lock lock(impl_->mu);
  impl_->cv.wait(lock, [this] { return impl_->stopped; });
}

void Server::stop() {
  auto& im = *impl_;
  {
    std::lock_guard lock(im.mu);
    im.stopped = true;
    im.cv.notify_all();
  }
  if (!im.started) return;
  im.started = false;
  net::post(im.acceptor.get_executor(), [&im] {
    beast::error_code ignored;
    im.acceptor.close(ignored);
  });
  im.hub.close_all();
  im.ioc.stop();
  for (auto& t : im.workers)
    if (t.joinable()) t.join();
  im.workers.clear();
}

}  // namespace aav

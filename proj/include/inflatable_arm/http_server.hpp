#pragma once

// HTTP + WebSocket front end for SessionManager (serve mode). One thread per
// connection; a background loop steps every session at a fixed rate.

#include <sys/socket.h>

#include <atomic>
#include <chrono>
#include <functional>
#include <cstdint>
#include <iostream>
#include <list>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <utility>

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/steady_timer.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "inflatable_arm/api.hpp"
#include "inflatable_arm/sim_service.hpp"

namespace inflatable_arm {

struct ServerOptions {
  std::string address = "127.0.0.1";
  std::uint16_t port = 8080;  // 0 picks a free port
  double step_hz = 50.0;
  double stream_hz = 30.0;
};

class SimServer {
 public:
  SimServer(SessionManager& sessions, ServerOptions opt)
      : sessions_(sessions), router_(sessions), opt_(std::move(opt)) {}

  SimServer(const SimServer&) = delete;
  SimServer& operator=(const SimServer&) = delete;
  ~SimServer() { stop(); }

  /// Binds and starts the accept and step threads. Returns the bound port.
  std::uint16_t start() {
    namespace asio = boost::asio;
    const auto endpoint = asio::ip::tcp::endpoint(asio::ip::make_address(opt_.address), opt_.port);
    acceptor_.open(endpoint.protocol());
    acceptor_.set_option(asio::socket_base::reuse_address(true));
    acceptor_.bind(endpoint);
    acceptor_.listen();
    port_ = acceptor_.local_endpoint().port();
    running_ = true;
    accept_thread_ = std::thread([this] { accept_loop(); });
    step_thread_ = std::thread([this] { step_loop(); });
    return port_;
  }

  std::uint16_t port() const noexcept { return port_; }

  void stop() {
    if (!running_.exchange(false)) return;
    {
      // Unblock accept() with a throwaway connection.
      boost::system::error_code ec;
      boost::asio::io_context ioc;
      boost::asio::ip::tcp::socket s(ioc);
      s.connect({boost::asio::ip::make_address(opt_.address), port_}, ec);
    }
    if (accept_thread_.joinable()) accept_thread_.join();
    if (step_thread_.joinable()) step_thread_.join();
    std::list<Connection> conns;
    {
      std::lock_guard lock(conn_mutex_);
      for (auto& c : connections_)
        if (!c.done->load()) ::shutdown(c.fd, SHUT_RDWR);
      conns.swap(connections_);
    }
    for (auto& c : conns)
      if (c.thread.joinable()) c.thread.join();
    boost::system::error_code ec;
    acceptor_.close(ec);
  }

 private:
  struct Connection {
    int fd = -1;
    std::shared_ptr<std::atomic<bool>> done = std::make_shared<std::atomic<bool>>(false);
    std::thread thread;
  };

  // Joins connection threads that have finished. Caller holds conn_mutex_.
  void reap_finished() {
    for (auto it = connections_.begin(); it != connections_.end();) {
      if (it->done->load()) {
        it->thread.join();
        it = connections_.erase(it);
      } else {
        ++it;
      }
    }
  }

  void accept_loop() {
    while (running_) {
      boost::system::error_code ec;
      boost::asio::ip::tcp::socket socket(ioc_);
      acceptor_.accept(socket, ec);
      if (ec) continue;
      if (!running_) break;
      std::lock_guard lock(conn_mutex_);
      reap_finished();
      auto& c = connections_.emplace_back();
      c.fd = socket.native_handle();
      c.thread = std::thread([this, done = c.done, s = std::move(socket)]() mutable {
        serve(std::move(s));
        done->store(true);
      });
    }
  }

  void step_loop() {
    using clock = std::chrono::steady_clock;
    const double dt = 1.0 / opt_.step_hz;
    const auto period = std::chrono::duration_cast<clock::duration>(std::chrono::duration<double>(dt));
    auto next = clock::now() + period;
    while (running_) {
      std::this_thread::sleep_until(next);
      next += period;
      sessions_.step_all(dt);
    }
  }

  void serve(boost::asio::ip::tcp::socket socket) {
    namespace beast = boost::beast;
    namespace http = beast::http;
    beast::flat_buffer buffer;
    while (running_) {
      http::request<http::string_body> req;
      beast::error_code ec;
      http::read(socket, buffer, req, ec);
      if (ec) break;
      if (beast::websocket::is_upgrade(req)) {
        stream(std::move(socket), std::move(req));
        return;
      }
      const auto result = router_.handle(std::string(req.method_string()), std::string(req.target()),
                                         req.body());
      http::response<http::string_body> res{static_cast<http::status>(result.status),
                                            req.version()};
      res.set(http::field::content_type, "application/json; charset=utf-8");
      res.set(http::field::access_control_allow_origin, "*");
      res.keep_alive(req.keep_alive());
      res.body() = result.body.dump();
      res.prepare_payload();
      http::write(socket, res, ec);
      if (ec || !res.keep_alive()) break;
    }
    beast::error_code ec;
    socket.shutdown(boost::asio::ip::tcp::socket::shutdown_both, ec);
  }

  void stream(boost::asio::ip::tcp::socket socket,
              boost::beast::http::request<boost::beast::http::string_body> req) {
    namespace beast = boost::beast;
    namespace websocket = beast::websocket;
    const auto path = parse_session_path(std::string(req.target()));
    std::shared_ptr<Session> session;
    try {
      if (!path || path->rest != "stream") throw UnknownSessionError(std::string(req.target()));
      session = sessions_.get(path->id);
    } catch (const UnknownSessionError&) {
      namespace http = beast::http;
      http::response<http::string_body> res{http::status::not_found, req.version()};
      res.body() = R"({"error":"unknown_session"})";
      res.prepare_payload();
      beast::error_code ec;
      http::write(socket, res, ec);
      return;
    }

    // Move the connection onto a private io_context so the client's frames
    // (pings, close) are read while snapshots are pushed on a timer.
    namespace asio = boost::asio;
    asio::io_context io;
    const auto protocol = socket.local_endpoint().protocol();
    websocket::stream<asio::ip::tcp::socket> ws(asio::ip::tcp::socket(io, protocol, socket.release()));
    beast::error_code ec;
    ws.accept(req, ec);
    if (ec) return;
    ws.text(true);

    using clock = asio::steady_timer::clock_type;
    const auto period = std::chrono::duration_cast<clock::duration>(
        std::chrono::duration<double>(1.0 / opt_.stream_hz));
    asio::steady_timer timer(io);
    auto next = clock::now();
    beast::flat_buffer inbox;
    std::string frame;
    bool closed = false;

    std::function<void()> read_next = [&] {
      ws.async_read(inbox, [&](beast::error_code e, std::size_t) {
        if (e) {
          closed = true;
          timer.cancel();
          return;
        }
        inbox.consume(inbox.size());  // client messages are ignored
        read_next();
      });
    };
    std::function<void()> push = [&] {
      if (closed) return;
      if (!running_) {
        ws.async_close(websocket::close_code::going_away, [](beast::error_code) {});
        return;
      }
      frame = to_json(session->snapshot()).dump();
      ws.async_write(asio::buffer(frame), [&](beast::error_code e, std::size_t) {
        if (e) return;
        next += period;
        timer.expires_at(next);
        timer.async_wait([&](beast::error_code te) {
          if (!te) push();
        });
      });
    };
    read_next();
    push();
    io.run();
  }

  SessionManager& sessions_;
  ApiRouter router_;
  ServerOptions opt_;
  boost::asio::io_context ioc_;
  boost::asio::ip::tcp::acceptor acceptor_{ioc_};
  std::uint16_t port_ = 0;
  std::atomic<bool> running_{false};
  std::thread accept_thread_;
  std::thread step_thread_;
  std::mutex conn_mutex_;
  std::list<Connection> connections_;
};

}  // namespace inflatable_arm

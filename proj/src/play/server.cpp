#include "mcon/play/server.hpp"

#include <boost/asio/signal_set.hpp>
#include <boost/asio/steady_timer.hpp>
#include <boost/asio/strand.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include <deque>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace mcon::play {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

std::string_view mime_type(const std::filesystem::path& p) {
  const auto ext = p.extension().string();
  if (ext == ".html") return "text/html";
  if (ext == ".js" || ext == ".mjs") return "application/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  return "application/octet-stream";
}

http::response<http::string_body> make_response(const http::request<http::string_body>& req, http::status status,
                                               std::string_view content_type, std::string body) {
  http::response<http::string_body> res{status, req.version()};
  res.set(http::field::content_type, std::string(content_type));
  res.set(http::field::access_control_allow_origin, "*");
  res.keep_alive(req.keep_alive());
  res.body() = std::move(body);
  res.prepare_payload();
  return res;
}

http::response<http::string_body> error_response(const http::request<http::string_body>& req, http::status status,
                                                const std::string& code, const std::string& text) {
  return make_response(req, status, "application/json", SessionManager::error_frame(code, text).dump());
}

http::response<http::string_body> route(SessionManager& sessions, const ServerOptions& opts,
                                        const http::request<http::string_body>& req) {
  if (req.method() != http::verb::get && req.method() != http::verb::head)
    return error_response(req, http::status::method_not_allowed, "bad_request", "only GET is supported");
  std::string target(req.target());
  if (const auto q = target.find('?'); q != std::string::npos) target.resize(q);

  if (target == "/tasks") return make_response(req, http::status::ok, "application/json", SessionManager::task_catalog().dump());

  constexpr std::string_view kRecords = "/records/";
  if (target.starts_with(kRecords)) {
    const std::string id = target.substr(kRecords.size());
    try {
      return make_response(req, http::status::ok, "application/x-ndjson", sessions.export_record(id));
    } catch (const PlayError& e) {
      const auto status = e.code() == "not_found" ? http::status::not_found : http::status::conflict;
      return error_response(req, status, e.code(), e.what());
    }
  }

  if (opts.static_dir) {
    if (target.find("..") != std::string::npos)
      return error_response(req, http::status::bad_request, "bad_request", "bad path");
    std::filesystem::path file = *opts.static_dir / (target == "/" ? std::string("index.html") : target.substr(1));
    std::ifstream in(file, std::ios::binary);
    if (in) {
      std::ostringstream ss;
      ss << in.rdbuf();
      return make_response(req, http::status::ok, mime_type(file), ss.str());
    }
  }
  return error_response(req, http::status::not_found, "not_found", "no route for " + target);
}

class WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(tcp::socket&& socket, SessionManager& sessions) : ws_(std::move(socket)), sessions_(sessions) {}

  void run(http::request<http::string_body> req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.text(true);
    ws_.async_accept(req, beast::bind_front_handler(&WsSession::on_accept, shared_from_this()));
  }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) return;
    do_read();
  }

  void do_read() { ws_.async_read(buffer_, beast::bind_front_handler(&WsSession::on_read, shared_from_this())); }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) {
      on_close();
      return;
    }
    const std::string frame = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    for (auto& out : sessions_.handle(frame, bound_)) outbox_.push_back(out.dump());
    write_next();
  }

  void write_next() {
    if (outbox_.empty()) {
      do_read();
      return;
    }
    ws_.async_write(asio::buffer(outbox_.front()), beast::bind_front_handler(&WsSession::on_write, shared_from_this()));
  }

  void on_write(beast::error_code ec, std::size_t) {
    if (ec) {
      on_close();
      return;
    }
    outbox_.pop_front();
    write_next();
  }

  // A dropped connection ends its live episode; the record stays downloadable.
  void on_close() {
    if (bound_.empty()) return;
    try {
      sessions_.resign(bound_);
    } catch (const PlayError&) {
    }
  }

  websocket::stream<beast::tcp_stream> ws_;
  SessionManager& sessions_;
  beast::flat_buffer buffer_;
  std::deque<std::string> outbox_;
  std::string bound_;
};

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket&& socket, SessionManager& sessions, const ServerOptions& opts)
      : stream_(std::move(socket)), sessions_(sessions), opts_(opts) {}

  void run() { asio::dispatch(stream_.get_executor(), beast::bind_front_handler(&HttpSession::do_read, shared_from_this())); }

 private:
  void do_read() {
    req_ = {};
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, req_, beast::bind_front_handler(&HttpSession::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) return;
    if (websocket::is_upgrade(req_)) {
      if (req_.target() == "/play") {
        stream_.expires_never();
        std::make_shared<WsSession>(stream_.release_socket(), sessions_)->run(std::move(req_));
        return;
      }
      res_ = error_response(req_, http::status::not_found, "not_found", "websocket endpoint is /play");
    } else {
      res_ = route(sessions_, opts_, req_);
    }
    http::async_write(stream_, res_, beast::bind_front_handler(&HttpSession::on_write, shared_from_this()));
  }

  void on_write(beast::error_code ec, std::size_t) {
    if (ec) return;
    if (!res_.keep_alive()) {
      stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
      return;
    }
    do_read();
  }

  beast::tcp_stream stream_;
  SessionManager& sessions_;
  const ServerOptions& opts_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
  http::response<http::string_body> res_;
};

}  // namespace

struct PlayServer::Impl {
  Impl(SessionManager& s, ServerOptions o) : sessions(s), opts(std::move(o)), acceptor(ioc), sweeper(ioc) {}

  void do_accept() {
    acceptor.async_accept(asio::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;
      std::make_shared<HttpSession>(std::move(socket), sessions, opts)->run();
      do_accept();
    });
  }

  void schedule_sweep() {
    sweeper.expires_after(std::chrono::seconds(60));
    sweeper.async_wait([this](beast::error_code ec) {
      if (ec) return;
      sessions.expire_idle();
      schedule_sweep();
    });
  }

  SessionManager& sessions;
  ServerOptions opts;
  asio::io_context ioc;
  tcp::acceptor acceptor;
  asio::steady_timer sweeper;
  std::vector<std::thread> threads;
  unsigned short bound_port = 0;
};

PlayServer::PlayServer(SessionManager& sessions, ServerOptions options)
    : impl_(std::make_unique<Impl>(sessions, std::move(options))) {}

PlayServer::~PlayServer() { stop(); }

void PlayServer::start() {
  const tcp::endpoint ep{asio::ip::make_address(impl_->opts.bind), impl_->opts.port};
  impl_->acceptor.open(ep.protocol());
  impl_->acceptor.set_option(asio::socket_base::reuse_address(true));
  impl_->acceptor.bind(ep);
  impl_->acceptor.listen(asio::socket_base::max_listen_connections);
  impl_->bound_port = impl_->acceptor.local_endpoint().port();
  impl_->do_accept();
  impl_->schedule_sweep();
  for (int i = 0; i < std::max(1, impl_->opts.threads); ++i) impl_->threads.emplace_back([this] { impl_->ioc.run(); });
}

unsigned short PlayServer::port() const { return impl_->bound_port; }

void PlayServer::stop() {
  if (!impl_) return;
  impl_->ioc.stop();
  for (auto& t : impl_->threads)
    if (t.joinable()) t.join();
  impl_->threads.clear();
}

void PlayServer::wait() {
  asio::signal_set signals(impl_->ioc, SIGINT, SIGTERM);
  signals.async_wait([this](beast::error_code, int) { impl_->ioc.stop(); });
  for (auto& t : impl_->threads)
    if (t.joinable()) t.join();
  impl_->threads.clear();
}

}  // namespace mcon::play

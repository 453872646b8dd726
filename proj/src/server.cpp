#include "mazecoord/server.hpp"

#include <sys/socket.h>

#include <mutex>
#include <thread>
#include <vector>

#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

namespace mazecoord {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;
using nlohmann::json;

namespace {

json error_body(const std::string& code, const std::string& message) {
  return {{"format_version", kWireFormatVersion},
          {"error", {{"code", code}, {"message", message}}}};
}

http::status status_for(const std::string& code) {
  if (code == "unknown_session" || code == "unknown_maze") return http::status::not_found;
  if (code == "duplicate_session") return http::status::conflict;
  return http::status::bad_request;
}

std::vector<std::string> split_path(beast::string_view raw) {
  std::string_view target(raw.data(), raw.size());
  target = target.substr(0, target.find('?'));
  std::vector<std::string> parts;
  std::size_t i = 0;
  while (i < target.size()) {
    std::size_t j = target.find('/', i);
    if (j == std::string_view::npos) j = target.size();
    if (j > i) parts.emplace_back(target.substr(i, j - i));
    i = j + 1;
  }
  return parts;
}

json messages_json(const std::vector<WireMessage>& msgs) {
  auto list = json::array();
  for (const auto& m : msgs) list.push_back(wire_to_json(m));
  return list;
}

}  // namespace

struct Server::Impl {
  Impl(SessionManager& m, const std::string& address, unsigned short port)
      : manager(m), acceptor(ioc, {net::ip::make_address(address), port}) {}

  http::response<http::string_body> route(const http::request<http::string_body>& req);
  void serve(std::shared_ptr<tcp::socket> sock);
  void run_websocket(tcp::socket& sock, const http::request<http::string_body>& req);

  SessionManager& manager;
  net::io_context ioc;
  tcp::acceptor acceptor;
  std::mutex mu;
  bool stopping = false;
  std::vector<std::thread> threads;
  std::vector<std::shared_ptr<tcp::socket>> sockets;
};

http::response<http::string_body> Server::Impl::route(const http::request<http::string_body>& req) {
  http::status status = http::status::ok;
  json body;
  const auto parts = split_path(req.target());
  try {
    if (req.method() == http::verb::get && parts == std::vector<std::string>{"mazes"}) {
      body = manager.maze_list();
    } else if (req.method() == http::verb::post && parts == std::vector<std::string>{"sessions"}) {
      json payload;
      try {
        payload = json::parse(req.body());
      } catch (const json::parse_error& e) {
        throw ServiceError("bad_request", std::string("malformed JSON: ") + e.what());
      }
      const auto msgs = manager.create_session(create_request_from_json(payload));
      body = {{"format_version", kWireFormatVersion},
              {"session_id", msgs.front().session_id},
              {"messages", messages_json(msgs)}};
      status = http::status::created;
    } else if (req.method() == http::verb::get && parts.size() == 3 && parts[0] == "sessions" &&
               parts[2] == "state") {
      body = manager.state(parts[1]);
    } else if (req.method() == http::verb::get && parts.size() == 3 && parts[0] == "sessions" &&
               parts[2] == "belief") {
      body = manager.belief_snapshot(parts[1]);
    } else {
      status = http::status::not_found;
      body = error_body("not_found", "no route for " + std::string(req.target()));
    }
  } catch (const ServiceError& e) {
    status = status_for(e.code());
    body = error_body(e.code(), e.what());
  }

  http::response<http::string_body> res{status, req.version()};
  res.set(http::field::content_type, "application/json");
  res.keep_alive(req.keep_alive());
  res.body() = body.dump();
  res.prepare_payload();
  return res;
}

void Server::Impl::run_websocket(tcp::socket& sock, const http::request<http::string_body>& req) {
  websocket::stream<tcp::socket&> ws(sock);
  beast::error_code ec;
  ws.accept(req, ec);
  if (ec) return;
  ws.text(true);
  beast::flat_buffer buffer;
  for (;;) {
    ws.read(buffer, ec);
    if (ec) return;
    std::vector<WireMessage> out;
    try {
      out = manager.handle(wire_from_json(json::parse(beast::buffers_to_string(buffer.data()))));
    } catch (const json::parse_error& e) {
      out = {{"error", "", 0, {{"code", "bad_request"}, {"message", e.what()}}}};
    } catch (const ServiceError& e) {
      out = {{"error", "", 0, {{"code", e.code()}, {"message", e.what()}}}};
    }
    buffer.consume(buffer.size());
    for (const auto& m : out) {
      ws.write(net::buffer(wire_to_json(m).dump()), ec);
      if (ec) return;
    }
  }
}

void Server::Impl::serve(std::shared_ptr<tcp::socket> sock) {
  beast::flat_buffer buffer;
  beast::error_code ec;
  for (;;) {
    http::request<http::string_body> req;
    http::read(*sock, buffer, req, ec);
    if (ec) break;
    if (websocket::is_upgrade(req)) {
      if (split_path(req.target()) == std::vector<std::string>{"ws"}) {
        run_websocket(*sock, req);
        break;
      }
    }
    auto res = route(req);
    http::write(*sock, res, ec);
    if (ec || !res.keep_alive()) break;
  }
  sock->shutdown(tcp::socket::shutdown_send, ec);
}

Server::Server(SessionManager& manager, const std::string& address, unsigned short port)
    : impl_(std::make_unique<Impl>(manager, address, port)) {}

Server::~Server() = default;

unsigned short Server::port() const { return impl_->acceptor.local_endpoint().port(); }

void Server::run() {
  for (;;) {
    auto sock = std::make_shared<tcp::socket>(impl_->ioc);
    beast::error_code ec;
    impl_->acceptor.accept(*sock, ec);
    std::lock_guard lock(impl_->mu);
    if (impl_->stopping) break;
    if (ec) continue;
    impl_->sockets.push_back(sock);
    impl_->threads.emplace_back([this, sock] { impl_->serve(sock); });
  }
  for (auto& t : impl_->threads) t.join();
  impl_->threads.clear();
  impl_->sockets.clear();
}

void Server::stop() {
  {
    std::lock_guard lock(impl_->mu);
    if (impl_->stopping) return;
    impl_->stopping = true;
    for (auto& s : impl_->sockets) ::shutdown(s->native_handle(), SHUT_RDWR);
  }
  // Wake the blocking accept with a throwaway connection.
  net::io_context ioc;
  tcp::socket wake(ioc);
  beast::error_code ec;
  auto endpoint = impl_->acceptor.local_endpoint();
  if (endpoint.address().is_unspecified()) endpoint.address(net::ip::make_address("127.0.0.1"));
  wake.connect(endpoint, ec);
}

}  // namespace mazecoord

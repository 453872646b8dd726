#include <doctest.h>

#include <thread>

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "mazecoord/server.hpp"

using namespace mazecoord;
using nlohmann::json;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

namespace {

struct Running {
  SessionManager manager{load_maze_catalog(FIXTURE_DIR)};
  Server server{manager, "127.0.0.1", 0};
  std::thread thread{[this] { server.run(); }};
  ~Running() {
    server.stop();
    thread.join();
  }
};

struct Reply {
  int status;
  json body;
};

Reply request(unsigned short port, http::verb verb, const std::string& target, const std::string& body = "") {
  net::io_context ioc;
  tcp::socket sock(ioc);
  sock.connect({net::ip::make_address("127.0.0.1"), port});
  http::request<http::string_body> req{verb, target, 11};
  req.set(http::field::host, "localhost");
  req.set(http::field::content_type, "application/json");
  req.body() = body;
  req.prepare_payload();
  http::write(sock, req);
  beast::flat_buffer buffer;
  http::response<http::string_body> res;
  http::read(sock, buffer, res);
  beast::error_code ec;
  sock.shutdown(tcp::socket::shutdown_both, ec);
  return {static_cast<int>(res.result_int()), json::parse(res.body())};
}

const json kCreate = {{"maze_ref", "small-3x3"}, {"init", {0, 0}}, {"goal", {2, 2}},
                      {"start", "H"},            {"seed", 4},       {"session_id", "http-1"}};

}  // namespace

TEST_CASE("HTTP routes") {
  Running r;
  const unsigned short port = r.server.port();
  REQUIRE(port != 0);

  auto mazes = request(port, http::verb::get, "/mazes");
  CHECK(mazes.status == 200);
  CHECK(mazes.body["mazes"].size() >= 3);

  auto created = request(port, http::verb::post, "/sessions", kCreate.dump());
  CHECK(created.status == 201);
  CHECK(created.body["session_id"] == "http-1");
  CHECK(created.body["messages"][0]["type"] == "created");

  auto dup = request(port, http::verb::post, "/sessions", kCreate.dump());
  CHECK(dup.status == 409);
  CHECK(dup.body["error"]["code"] == "duplicate_session");

  auto state = request(port, http::verb::get, "/sessions/http-1/state");
  CHECK(state.status == 200);
  CHECK(state.body["phase"] == "human_turn");
  CHECK(state.body["format_version"] == 1);

  auto belief = request(port, http::verb::get, "/sessions/http-1/belief");
  CHECK(belief.status == 200);
  CHECK(belief.body["belief"].size() == 3 * 3 * 4);

  CHECK(request(port, http::verb::get, "/sessions/nope/state").status == 404);
  CHECK(request(port, http::verb::get, "/nowhere").status == 404);
  CHECK(request(port, http::verb::post, "/sessions", "{not json").status == 400);
  json unknown = kCreate;
  unknown["maze_ref"] = "missing";
  unknown.erase("session_id");
  CHECK(request(port, http::verb::post, "/sessions", unknown.dump()).status == 404);
}

TEST_CASE("WebSocket session") {
  Running r;
  net::io_context ioc;
  websocket::stream<tcp::socket> ws(ioc);
  ws.next_layer().connect({net::ip::make_address("127.0.0.1"), r.server.port()});
  ws.handshake("localhost", "/ws");
  ws.text(true);

  auto send = [&](const json& j) { ws.write(net::buffer(j.dump())); };
  auto recv = [&] {
    beast::flat_buffer buffer;
    ws.read(buffer);
    return json::parse(beast::buffers_to_string(buffer.data()));
  };

  send({{"type", "create"}, {"payload", kCreate}});
  auto m = recv();
  CHECK(m["type"] == "created");
  CHECK(m["seq"] == 1);
  CHECK(m["session_id"] == "http-1");
  m = recv();
  CHECK(m["type"] == "state_update");

  send({{"type", "human_action"}, {"session_id", "http-1"}, {"payload", {{"action", "Bogus"}}}});
  m = recv();
  CHECK(m["type"] == "error");
  CHECK(m["payload"]["code"] == "bad_request");

  send({{"type", "belief_snapshot"}, {"session_id", "http-1"}});
  m = recv();
  CHECK(m["type"] == "belief_snapshot");
  CHECK(m["seq"] == 3);

  send(json::parse(R"({"type":"human_intent","session_id":"http-1","payload":{"cells":[[1,0],[1,1]]}})"));
  m = recv();
  CHECK(m["type"] == "state_update");
  CHECK(m["payload"]["human_intent"].size() == 2);

  ws.write(net::buffer(std::string("not json")));
  m = recv();
  CHECK(m["type"] == "error");

  ws.close(websocket::close_code::normal);
}

TEST_CASE("server stops with a client still connected") {
  auto r = std::make_unique<Running>();
  net::io_context ioc;
  tcp::socket idle(ioc);
  idle.connect({net::ip::make_address("127.0.0.1"), r->server.port()});
  r.reset();
  CHECK(true);
}

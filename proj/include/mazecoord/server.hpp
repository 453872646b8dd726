#pragma once

#include <memory>
#include <string>

#include "mazecoord/service.hpp"

namespace mazecoord {

// HTTP + WebSocket front end over a SessionManager, one thread per
// connection.
//   GET  /mazes                 fixture list
//   POST /sessions              create (body: create payload)
//   GET  /sessions/{id}/state   session state
//   GET  /sessions/{id}/belief  agent belief export
//   GET  /ws                    WebSocket upgrade; wire messages as text frames
class Server {
 public:
  // Port 0 picks a free port; see port().
  Server(SessionManager& manager, const std::string& address, unsigned short port);
  ~Server();

  unsigned short port() const;
  // Accepts connections until stop() is called.
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace mazecoord

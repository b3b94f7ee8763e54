#pragma once
// HTTP transport: POST /api carries protocol messages, GET /events?session=ID
// streams pushed events as server-sent events, GET /health answers "ok".

#include <memory>
#include <string>

#include "isbst/session/protocol.hpp"

namespace isbst::session {

class Server {
 public:
  Server(SessionManager& manager, ProtocolOptions options = {});
  ~Server();

  // Binds and serves until stop(); returns false if the port cannot be bound.
  bool listen(const std::string& host, int port);
  // Binds an ephemeral port; returns it, or -1.
  int bind_any(const std::string& host);
  void serve_bound();  // blocking, after bind_any
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace isbst::session

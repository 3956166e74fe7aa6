#pragma once

#include "mcon/play/service.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

namespace mcon::play {

struct ServerOptions {
  std::string bind = "127.0.0.1";
  unsigned short port = 8080;  // 0 picks a free port
  int threads = 1;
  std::optional<std::filesystem::path> static_dir;
};

/// HTTP + WebSocket front end for a SessionManager.
///   GET /tasks          task catalog
///   GET /records/{id}   finished episode record (404 unknown, 409 still running)
///   GET /play           WebSocket upgrade; one JSON frame per message
///   GET /...            files under static_dir, when set
class PlayServer {
 public:
  PlayServer(SessionManager& sessions, ServerOptions options);
  ~PlayServer();
  PlayServer(const PlayServer&) = delete;
  PlayServer& operator=(const PlayServer&) = delete;

  /// Binds and starts serving on background threads.
  void start();
  /// Port actually bound (after start).
  unsigned short port() const;
  void stop();
  /// Blocks until stop() is called from another thread or a signal arrives.
  void wait();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace mcon::play

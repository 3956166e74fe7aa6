#pragma once

#include "mcon/episode.hpp"
#include "mcon/tasks.hpp"

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcon::play {

enum class Mode { Training, Evaluation };

std::string_view to_string(Mode mode);
Mode mode_from_string(std::string_view text);

/// Protocol-level failure. `code` is the wire error code.
class PlayError : public std::runtime_error {
 public:
  PlayError(std::string code, const std::string& text) : std::runtime_error(text), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

using Clock = std::function<std::chrono::steady_clock::time_point()>;

struct ServiceOptions {
  std::chrono::seconds idle_timeout{30 * 60};
  Clock clock;                            // steady_clock::now when empty
  std::optional<std::uint64_t> id_seed;   // random_device when empty
  std::optional<std::uint64_t> seed_seed; // source of seeds for sessions created without one
};

/// Transport-free session logic. Frames in, frames out; the server only moves bytes.
///
/// Client frames: {"type":"create","task","mode","seed"?}, {"type":"action","action"},
/// {"type":"resign"}. Action and resign address the connection's bound session, or an
/// explicit "session" field.
/// Server frames: "state", "episode_end", "error" (see the README for fields).
class SessionManager {
 public:
  explicit SessionManager(ServiceOptions options = {});
  ~SessionManager();

  /// Handles one text frame. `bound` is the connection's current session id and is updated
  /// by create. Never throws; protocol failures become error frames.
  std::vector<nlohmann::json> handle(std::string_view frame, std::string& bound);

  std::vector<nlohmann::json> create(const std::string& task, Mode mode, std::optional<std::uint64_t> seed,
                                     std::string& bound);
  std::vector<nlohmann::json> act(const std::string& id, Action action);
  std::vector<nlohmann::json> resign(const std::string& id);

  /// Finished episode as record text (same format as agent records).
  std::string export_record(const std::string& id);
  EpisodeRecord record(const std::string& id);

  /// Drops sessions idle for longer than the timeout. Returns how many were removed.
  std::size_t expire_idle();
  std::size_t session_count() const;

  static nlohmann::json task_catalog();
  static nlohmann::json error_frame(const std::string& code, const std::string& text);

 private:
  struct Session;
  std::shared_ptr<Session> find(const std::string& id);
  std::chrono::steady_clock::time_point now() const;
  std::string fresh_id();

  ServiceOptions options_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  Rng id_rng_;
  Rng seed_rng_;
};

}  // namespace mcon::play

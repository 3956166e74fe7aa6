#pragma once

#include "mcon/episode.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace mcon {

enum class ReplayStatus { Ok, Fail, Incompatible, Malformed };

std::string_view to_string(ReplayStatus status);

struct ReplayVerdict {
  ReplayStatus status = ReplayStatus::Ok;
  /// First divergent step (0-based). Equal to the step count for footer divergences; empty
  /// for header-level problems.
  std::optional<std::size_t> step;
  std::string message;

  bool ok() const { return status == ReplayStatus::Ok; }
};

/// Re-simulates a record from its header seed and design and checks every step, the footer
/// and the digest.
ReplayVerdict replay_text(std::string_view text);
ReplayVerdict replay(const std::filesystem::path& record_path);

}  // namespace mcon

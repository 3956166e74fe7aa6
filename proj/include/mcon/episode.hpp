#pragma once

#include "mcon/agent.hpp"
#include "mcon/env.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace mcon {

inline constexpr std::string_view kRecordFormat = "mcon-episode/1";

struct StepRecord {
  int n_steps = 0;
  Pose pose;
  Action action = Action::Drop;
  int sampled_distance = 0;
  int reward = 0;
  int n_bricks = 0;

  friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

/// Seeded, replayable log of one episode. `cfg.seed` is the episode seed.
struct EpisodeRecord {
  std::string task;
  std::string agent;
  nlohmann::json agent_params = nlohmann::json::object();
  EnvConfig cfg;
  Design design;
  Pose initial_pose;
  std::vector<StepRecord> steps;
  CellGrid final_grid;
  double iou = 0.0;
  DoneReason done_reason = DoneReason::None;
  std::optional<std::string> error;  // set when the agent failed and the episode was aborted

  bool aborted() const { return error.has_value(); }
};

/// "fnv1a64:<hex>" of the record format tag and the canonical config document.
std::string config_hash(const EnvConfig& cfg);

/// Runs reset/step until done. An agent exception or illegal action aborts the episode and
/// is stored in `error`.
EpisodeRecord run_episode(const EnvConfig& cfg, std::shared_ptr<const Design> design, Agent& agent,
                          std::string task = "custom");

/// Seed used for the agent's own generator in an episode.
std::uint64_t agent_seed(std::uint64_t episode_seed);

class RecordError : public std::runtime_error {
 public:
  enum class Kind { Malformed, Incompatible };
  RecordError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// Line-delimited JSON: header, one line per step, footer. The footer carries a digest over
// every preceding byte plus the footer's own fields.
std::string record_to_text(const EpisodeRecord& record);

/// Parses and checks format/config hash (RecordError::Incompatible) and syntax
/// (RecordError::Malformed). Does not verify the digest or re-simulate; see replay().
EpisodeRecord record_from_text(std::string_view text);

void write_record(const std::filesystem::path& path, const EpisodeRecord& record);
EpisodeRecord read_record(const std::filesystem::path& path);

}  // namespace mcon

#pragma once

#include "mcon/episode.hpp"
#include "mcon/tasks.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mcon {

struct AgentSpec {
  std::string name = "handcrafted";
  nlohmann::json params = nlohmann::json::object();
};

/// One benchmark run. Episode i uses seed `seed_base + i`; dynamic runs number episodes
/// group-major (group g, episode j -> i = g * n_episodes + j).
struct RunConfig {
  std::string task = "1d-static";
  nlohmann::json env_overrides = nlohmann::json::object();
  std::optional<std::filesystem::path> design_file;  // static tasks: replaces the built-in design
  AgentSpec agent;
  int n_episodes = 500;  // static: total; dynamic: per group
  int n_groups = 10;     // dynamic only
  std::uint64_t seed_base = 0;
  int parallelism = 1;
  std::optional<std::filesystem::path> records_dir;
  std::optional<std::filesystem::path> report_dir;

  /// Task defaults with `env_overrides` applied on top.
  EnvConfig env() const;
  static RunConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct GroupStats {
  int group_id = -1;
  int episodes = 0;
  double avg_iou = 0.0;
  double min_iou = 0.0;
};

struct BenchResult {
  std::string task;
  std::string agent;
  std::string config_hash;
  std::vector<double> ious;  // episode order
  std::vector<int> group_ids;
  double avg_iou = 0.0;
  double min_iou = 0.0;
  std::vector<GroupStats> groups;  // ascending group id; dynamic runs only
  std::map<std::string, int> done_reasons;
  double wall_seconds = 0.0;
  bool valid = true;
  std::vector<std::string> errors;
};

/// Hash identifying (env config without seed, agent, agent params).
std::string bench_config_hash(EnvConfig cfg, std::string_view agent, const nlohmann::json& agent_params);

/// Order-independent aggregation of finished episodes.
BenchResult aggregate(std::span<const EpisodeRecord> records);

BenchResult run_static(const RunConfig& cfg, std::vector<EpisodeRecord>* records = nullptr);
BenchResult run_dynamic(const RunConfig& cfg, std::vector<EpisodeRecord>* records = nullptr);
/// Dispatches on the task variant.
BenchResult run_bench(const RunConfig& cfg, std::vector<EpisodeRecord>* records = nullptr);

/// Regroups persisted records (one file each, *.jsonl) by task, agent and config hash.
std::vector<BenchResult> results_from_records(const std::filesystem::path& dir);

std::string report_csv(std::span<const BenchResult> results);
nlohmann::json report_json(std::span<const BenchResult> results);
/// Writes results.csv and results.json into `dir`.
void emit_report(std::span<const BenchResult> results, const std::filesystem::path& dir);

}  // namespace mcon

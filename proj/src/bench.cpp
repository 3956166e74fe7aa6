#include "mcon/bench.hpp"

#include "mcon/design_io.hpp"
#include "mcon/hash.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <mutex>
#include <numeric>
#include <thread>
#include <tuple>

namespace mcon {

namespace {

struct Job {
  std::size_t index;
  std::uint64_t seed;
  std::shared_ptr<const Design> design;
};

struct Summary {
  double iou = 0.0;
  int group_id = -1;
  DoneReason reason = DoneReason::None;
  std::optional<std::string> error;
};

Summary summarize(const EpisodeRecord& r) { return {r.iou, r.design.group_id, r.done_reason, r.error}; }

double sorted_sum(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return std::accumulate(values.begin(), values.end(), 0.0);
}

BenchResult from_summaries(std::string task, std::string agent, std::string hash, const std::vector<Summary>& eps) {
  BenchResult res;
  res.task = std::move(task);
  res.agent = std::move(agent);
  res.config_hash = std::move(hash);
  if (eps.empty()) {
    res.valid = false;
    res.errors.push_back("no episodes");
    return res;
  }
  std::map<int, std::vector<double>> by_group;
  for (const auto& e : eps) {
    res.ious.push_back(e.iou);
    res.group_ids.push_back(e.group_id);
    ++res.done_reasons[std::string(to_string(e.reason))];
    if (e.error) {
      res.valid = false;
      res.errors.push_back(*e.error);
    }
    by_group[e.group_id].push_back(e.iou);
  }
  res.avg_iou = sorted_sum(res.ious) / static_cast<double>(res.ious.size());
  res.min_iou = *std::min_element(res.ious.begin(), res.ious.end());
  if (by_group.size() > 1 || by_group.begin()->first >= 0) {
    for (const auto& [gid, values] : by_group) {
      res.groups.push_back({gid, static_cast<int>(values.size()), sorted_sum(values) / static_cast<double>(values.size()),
                            *std::min_element(values.begin(), values.end())});
    }
  }
  return res;
}

std::string record_file_name(const std::string& task, const std::string& agent, std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06zu", index);
  return task + "-" + agent + "-" + buf + ".jsonl";
}

BenchResult run_jobs(const RunConfig& rc, const EnvConfig& base, const std::vector<Job>& jobs,
                     std::vector<EpisodeRecord>* records_out) {
  const auto started = std::chrono::steady_clock::now();
  const auto probe = make_agent(rc.agent.name, rc.agent.params);
  const std::string agent_name(probe->name());
  const nlohmann::json agent_params = probe->params();
  if (rc.records_dir) std::filesystem::create_directories(*rc.records_dir);

  std::vector<Summary> summaries(jobs.size());
  std::vector<EpisodeRecord> records(records_out ? jobs.size() : 0);
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::vector<std::string> failures;

  auto worker = [&] {
    for (std::size_t k = next++; k < jobs.size(); k = next++) {
      const Job& job = jobs[k];
      try {
        EnvConfig cfg = base;
        cfg.seed = job.seed;
        auto agent = make_agent(rc.agent.name, rc.agent.params);
        EpisodeRecord rec = run_episode(cfg, job.design, *agent, rc.task);
        summaries[k] = summarize(rec);
        if (rc.records_dir) write_record(*rc.records_dir / record_file_name(rc.task, agent_name, job.index), rec);
        if (records_out) records[k] = std::move(rec);
      } catch (const std::exception& e) {
        summaries[k].error = std::string("episode ") + std::to_string(job.index) + ": " + e.what();
        summaries[k].group_id = job.design->group_id;
        std::lock_guard lock(error_mutex);
        failures.push_back(e.what());
      }
    }
  };

  const int n_threads = std::clamp(rc.parallelism, 1, static_cast<int>(std::max<std::size_t>(jobs.size(), 1)));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  BenchResult res = from_summaries(rc.task, agent_name, bench_config_hash(base, agent_name, agent_params), summaries);
  res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  if (records_out) *records_out = std::move(records);
  return res;
}

}  // namespace

EnvConfig RunConfig::env() const {
  const auto& t = find_task(task);
  nlohmann::json doc = mcon::to_json(t.env_defaults());
  doc.merge_patch(env_overrides);
  EnvConfig cfg = env_config_from_json(doc);
  cfg.variant = t.variant;
  cfg.density = t.density;
  cfg.validate();
  return cfg;
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  RunConfig rc;
  rc.task = j.at("task").get<std::string>();
  find_task(rc.task);
  if (j.contains("env")) rc.env_overrides = j.at("env");
  if (j.contains("design_file")) rc.design_file = j.at("design_file").get<std::string>();
  if (j.contains("agent")) {
    const auto& a = j.at("agent");
    if (a.is_string()) {
      rc.agent.name = a.get<std::string>();
    } else {
      rc.agent.name = a.at("name").get<std::string>();
      rc.agent.params = a.value("params", nlohmann::json::object());
    }
  }
  const bool dynamic = find_task(rc.task).variant == Variant::Dynamic;
  rc.n_episodes = j.value("n_episodes", dynamic ? 200 : 500);
  rc.n_groups = j.value("n_groups", 10);
  rc.seed_base = j.value("seed_base", std::uint64_t{0});
  rc.parallelism = j.value("parallelism", 1);
  if (j.contains("records_dir")) rc.records_dir = j.at("records_dir").get<std::string>();
  if (j.contains("report_dir")) rc.report_dir = j.at("report_dir").get<std::string>();
  if (rc.n_episodes < 1) throw ContractError("n_episodes must be at least 1");
  if (rc.n_groups < 1 || rc.n_groups > 10) throw ContractError("n_groups must lie in [1, 10]");
  if (rc.parallelism < 1) throw ContractError("parallelism must be at least 1");
  return rc;
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j = {{"task", task},
                      {"env", env_overrides},
                      {"agent", {{"name", agent.name}, {"params", agent.params}}},
                      {"n_episodes", n_episodes},
                      {"n_groups", n_groups},
                      {"seed_base", seed_base},
                      {"parallelism", parallelism}};
  if (design_file) j["design_file"] = design_file->string();
  if (records_dir) j["records_dir"] = records_dir->string();
  if (report_dir) j["report_dir"] = report_dir->string();
  return j;
}

std::string bench_config_hash(EnvConfig cfg, std::string_view agent, const nlohmann::json& agent_params) {
  cfg.seed = 0;
  const std::string doc = "mcon-bench/1|" + to_json(cfg).dump() + "|" + std::string(agent) + "|" + agent_params.dump();
  return "fnv1a64:" + hex64(fnv1a64(doc));
}

BenchResult aggregate(std::span<const EpisodeRecord> records) {
  if (records.empty()) return from_summaries("", "", "", {});
  std::vector<Summary> s;
  s.reserve(records.size());
  for (const auto& r : records) s.push_back(summarize(r));
  const auto& first = records.front();
  return from_summaries(first.task, first.agent, bench_config_hash(first.cfg, first.agent, first.agent_params), s);
}

BenchResult run_static(const RunConfig& rc, std::vector<EpisodeRecord>* records) {
  const auto& task = find_task(rc.task);
  if (task.variant != Variant::Static) throw ContractError("run_static: " + rc.task + " is a dynamic task");
  const EnvConfig env = rc.env();
  auto design = std::make_shared<const Design>(rc.design_file ? read_design(*rc.design_file)
                                                              : generate(static_spec(task.family), env));
  std::vector<Job> jobs;
  for (int i = 0; i < rc.n_episodes; ++i)
    jobs.push_back({static_cast<std::size_t>(i), rc.seed_base + static_cast<std::uint64_t>(i), design});
  return run_jobs(rc, env, jobs, records);
}

BenchResult run_dynamic(const RunConfig& rc, std::vector<EpisodeRecord>* records) {
  const auto& task = find_task(rc.task);
  if (task.variant != Variant::Dynamic) throw ContractError("run_dynamic: " + rc.task + " is a static task");
  const EnvConfig env = rc.env();
  const auto groups = dynamic_test_groups(task.family, env);
  std::vector<Job> jobs;
  for (int g = 0; g < rc.n_groups; ++g) {
    auto design = std::make_shared<const Design>(groups[g]);
    for (int j = 0; j < rc.n_episodes; ++j) {
      const auto index = static_cast<std::size_t>(g) * rc.n_episodes + j;
      jobs.push_back({index, rc.seed_base + index, design});
    }
  }
  return run_jobs(rc, env, jobs, records);
}

BenchResult run_bench(const RunConfig& rc, std::vector<EpisodeRecord>* records) {
  return find_task(rc.task).variant == Variant::Static ? run_static(rc, records) : run_dynamic(rc, records);
}

std::vector<BenchResult> results_from_records(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  using Key = std::tuple<std::size_t, std::string, std::string, std::string>;
  std::map<Key, std::vector<EpisodeRecord>> grouped;
  const auto tasks = all_tasks();
  for (const auto& f : files) {
    EpisodeRecord r = read_record(f);
    const auto it = std::find_if(tasks.begin(), tasks.end(), [&](const TaskDescriptor& t) { return t.name == r.task; });
    const std::size_t order = static_cast<std::size_t>(it - tasks.begin());
    grouped[{order, r.task, r.agent, bench_config_hash(r.cfg, r.agent, r.agent_params)}].push_back(std::move(r));
  }

  std::vector<BenchResult> results;
  for (auto& [key, recs] : grouped) {
    std::sort(recs.begin(), recs.end(), [](const EpisodeRecord& a, const EpisodeRecord& b) { return a.cfg.seed < b.cfg.seed; });
    results.push_back(aggregate(recs));
  }
  return results;
}

std::string report_csv(std::span<const BenchResult> results) {
  std::string out = "task,agent,config_hash,episodes,avg_iou,min_iou,min_group_avg_iou,step_budget,brick_budget,immobilized,valid\n";
  auto count = [](const BenchResult& r, std::string_view reason) {
    const auto it = r.done_reasons.find(std::string(reason));
    return it == r.done_reasons.end() ? 0 : it->second;
  };
  for (const auto& r : results) {
    char num[96];
    std::snprintf(num, sizeof num, "%.6f,%.6f,", r.avg_iou, r.min_iou);
    std::string group_min;
    if (!r.groups.empty()) {
      double m = r.groups.front().avg_iou;
      for (const auto& g : r.groups) m = std::min(m, g.avg_iou);
      char gbuf[32];
      std::snprintf(gbuf, sizeof gbuf, "%.6f", m);
      group_min = gbuf;
    }
    out += r.task + "," + r.agent + "," + r.config_hash + "," + std::to_string(r.ious.size()) + "," + num + group_min +
           "," + std::to_string(count(r, "step_budget")) + "," + std::to_string(count(r, "brick_budget")) + "," +
           std::to_string(count(r, "immobilized")) + "," + (r.valid ? "true" : "false") + "\n";
  }
  return out;
}

nlohmann::json report_json(std::span<const BenchResult> results) {
  auto rows = nlohmann::json::array();
  for (const auto& r : results) {
    auto groups = nlohmann::json::array();
    for (const auto& g : r.groups)
      groups.push_back({{"group_id", g.group_id}, {"episodes", g.episodes}, {"avg_iou", g.avg_iou}, {"min_iou", g.min_iou}});
    rows.push_back({{"task", r.task},
                    {"agent", r.agent},
                    {"config_hash", r.config_hash},
                    {"episodes", r.ious.size()},
                    {"avg_iou", r.avg_iou},
                    {"min_iou", r.min_iou},
                    {"groups", groups},
                    {"done_reasons", r.done_reasons},
                    {"valid", r.valid},
                    {"errors", r.errors},
                    {"ious", r.ious}});
  }
  return {{"format", "mcon-report/1"}, {"results", rows}};
}

void emit_report(std::span<const BenchResult> results, const std::filesystem::path& dir) {
  if (results.empty()) throw ContractError("emit_report: no results");
  write_text_file(dir / "results.csv", report_csv(results));
  write_text_file(dir / "results.json", report_json(results).dump(2) + "\n");
}

}  // namespace mcon

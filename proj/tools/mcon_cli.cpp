#include "mcon/bench.hpp"
#include "mcon/design_io.hpp"
#include "mcon/designs.hpp"
#include "mcon/play/server.hpp"
#include "mcon/replay.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitVerify = 2;

// "key=value" → env override; value parsed as JSON when possible, else kept as a string.
json parse_overrides(const std::vector<std::string>& items) {
  json out = json::object();
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw CLI::ValidationError("--set", "expected key=value, got " + item);
    const std::string key = item.substr(0, eq), value = item.substr(eq + 1);
    auto parsed = json::parse(value, nullptr, false);
    out[key] = parsed.is_discarded() ? json(value) : parsed;
  }
  return out;
}

void print_summary(const mcon::BenchResult& r) {
  std::fprintf(stderr, "%s %s: %zu episodes, avg %.6f, min %.6f, %.1fs%s\n", r.task.c_str(), r.agent.c_str(),
               r.ious.size(), r.avg_iou, r.min_iou, r.wall_seconds, r.valid ? "" : " (INVALID)");
  for (const auto& e : r.errors) std::fprintf(stderr, "  error: %s\n", e.c_str());
}

int cmd_bench(const std::string& config_path, const std::string& from_records, const std::string& out_dir,
              const std::string& records_dir, int parallel, int episodes) {
  std::vector<mcon::BenchResult> results;
  std::optional<std::filesystem::path> report_dir;
  if (!out_dir.empty()) report_dir = out_dir;

  if (!from_records.empty()) {
    results = mcon::results_from_records(from_records);
  } else {
    const json doc = json::parse(mcon::read_text_file(config_path));
    std::vector<json> runs;
    if (doc.contains("runs")) {
      for (const auto& r : doc.at("runs")) runs.push_back(r);
    } else {
      runs.push_back(doc);
    }
    for (const auto& run_doc : runs) {
      mcon::RunConfig rc = mcon::RunConfig::from_json(run_doc);
      if (parallel > 0) rc.parallelism = parallel;
      if (episodes > 0) rc.n_episodes = episodes;
      if (!records_dir.empty()) rc.records_dir = records_dir;
      if (!report_dir && rc.report_dir) report_dir = rc.report_dir;
      results.push_back(mcon::run_bench(rc));
      print_summary(results.back());
    }
  }
  if (results.empty()) {
    std::cerr << "no results\n";
    return kExitUsage;
  }
  std::cout << mcon::report_csv(results);
  if (report_dir) mcon::emit_report(results, *report_dir);
  for (const auto& r : results)
    if (!r.valid) return kExitVerify;
  return kExitOk;
}

int cmd_episode(const std::string& task_name, std::uint64_t seed, const std::string& agent_name,
                const std::string& params, const std::vector<std::string>& sets, const std::string& design_file,
                int group, const std::string& record_path, bool verbose) {
  const auto& task = mcon::find_task(task_name);
  mcon::RunConfig rc;
  rc.task = task_name;
  rc.env_overrides = parse_overrides(sets);
  mcon::EnvConfig cfg = rc.env();
  cfg.seed = seed;

  std::shared_ptr<const mcon::Design> design;
  if (!design_file.empty()) {
    design = std::make_shared<const mcon::Design>(mcon::read_design(design_file));
  } else if (task.variant == mcon::Variant::Static) {
    design = std::make_shared<const mcon::Design>(mcon::generate(mcon::static_spec(task.family), cfg));
  } else {
    const auto groups = mcon::dynamic_test_groups(task.family, cfg);
    if (group < 0 || group >= static_cast<int>(groups.size())) throw CLI::ValidationError("--group", "out of range");
    design = std::make_shared<const mcon::Design>(groups[group]);
  }

  auto agent = mcon::make_agent(agent_name, json::parse(params));
  const mcon::EpisodeRecord rec = mcon::run_episode(cfg, design, *agent, task_name);
  if (verbose) {
    std::printf("start (%d,%d)\n", rec.initial_pose.x, rec.initial_pose.y);
    for (const auto& s : rec.steps)
      std::printf("Ns=%d %-12s d=%d pose=(%d,%d) reward=%d Nb=%d\n", s.n_steps, std::string(mcon::to_string(s.action)).c_str(),
                  s.sampled_distance, s.pose.x, s.pose.y, s.reward, s.n_bricks);
  }
  std::printf("task=%s agent=%s seed=%llu steps=%zu iou=%.6f done=%s\n", task_name.c_str(), rec.agent.c_str(),
              static_cast<unsigned long long>(seed), rec.steps.size(), rec.iou,
              std::string(mcon::to_string(rec.done_reason)).c_str());
  if (rec.error) std::printf("error: %s\n", rec.error->c_str());
  if (!record_path.empty()) mcon::write_record(record_path, rec);
  return rec.aborted() ? kExitVerify : kExitOk;
}

int cmd_replay(const std::vector<std::string>& files) {
  int code = kExitOk;
  for (const auto& f : files) {
    const auto v = mcon::replay(f);
    std::printf("%s %s", std::string(mcon::to_string(v.status)).c_str(), f.c_str());
    if (v.step) std::printf(" step=%zu", *v.step);
    std::printf(": %s\n", v.message.c_str());
    if (!v.ok()) code = kExitVerify;
  }
  return code;
}

int cmd_designs(const std::string& out, bool list) {
  if (list || out.empty()) {
    for (const auto& t : mcon::all_tasks())
      std::printf("%-18s %s %s %s %s\n", t.name.c_str(), std::string(mcon::to_string(t.dim)).c_str(),
                  std::string(mcon::to_string(t.variant)).c_str(), std::string(mcon::to_string(t.density)).c_str(),
                  std::string(mcon::to_string(t.family)).c_str());
    if (out.empty()) return kExitOk;
  }
  const json manifest = mcon::emit_design_suite(out);
  std::size_t n = manifest.at("static").size();
  for (const auto& [family, groups] : manifest.at("dynamic").items()) n += groups.size();
  std::printf("wrote %zu design files to %s\n", n, out.c_str());
  return kExitOk;
}

int cmd_serve(const std::string& bind, unsigned short port, const std::string& static_dir, int threads, int idle_minutes) {
  mcon::play::ServiceOptions sopts;
  sopts.idle_timeout = std::chrono::minutes(idle_minutes);
  mcon::play::SessionManager sessions(sopts);
  mcon::play::ServerOptions opts;
  opts.bind = bind;
  opts.port = port;
  opts.threads = threads;
  if (!static_dir.empty()) opts.static_dir = static_dir;
  mcon::play::PlayServer server(sessions, opts);
  server.start();
  std::printf("serving on http://%s:%u (ws /play)\n", bind.c_str(), server.port());
  std::fflush(stdout);
  server.wait();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mobile construction benchmark"};
  app.require_subcommand(1);

  std::string config, from_records, out_dir, records_dir;
  int parallel = 0, episodes = 0;
  auto* bench = app.add_subcommand("bench", "Run benchmark configs and print the results table");
  bench->add_option("config", config, "Run config (JSON object, or {\"runs\": [...]})");
  bench->add_option("--from-records", from_records, "Rebuild the table from a directory of episode records");
  bench->add_option("--out", out_dir, "Write results.csv and results.json here");
  bench->add_option("--records", records_dir, "Persist every episode record here");
  bench->add_option("-j,--parallel", parallel, "Worker threads")->check(CLI::PositiveNumber);
  bench->add_option("-n,--episodes", episodes, "Override episodes (per group for dynamic tasks)")->check(CLI::PositiveNumber);

  std::string task = "1d-static", agent = "handcrafted", params = "{}", design_file, record_path;
  std::uint64_t seed = 0;
  int group = 0;
  bool verbose = false;
  std::vector<std::string> sets;
  auto* episode = app.add_subcommand("episode", "Run one seeded episode");
  episode->add_option("--task", task)->required();
  episode->add_option("--seed", seed);
  episode->add_option("--agent", agent);
  episode->add_option("--params", params, "Agent params as JSON");
  episode->add_option("--set", sets, "Env override key=value (repeatable)");
  episode->add_option("--design", design_file, "Design file for static tasks");
  episode->add_option("--group", group, "Test group for dynamic tasks");
  episode->add_option("--record", record_path, "Write the episode record here");
  episode->add_flag("-v,--verbose", verbose, "Print every step");

  std::vector<std::string> replay_files;
  auto* replay = app.add_subcommand("replay", "Verify episode records");
  replay->add_option("records", replay_files)->required();

  std::string designs_out;
  bool list = false;
  auto* designs = app.add_subcommand("designs", "Emit or list the design suite");
  designs->add_option("--out", designs_out, "Directory for design files");
  designs->add_flag("--list", list, "List tasks and families");

  std::string bind = "127.0.0.1", static_dir;
  unsigned short port = 8080;
  int threads = 1, idle_minutes = 30;
  auto* serve = app.add_subcommand("serve", "Start the play service");
  serve->add_option("--bind", bind);
  serve->add_option("--port", port);
  serve->add_option("--static-dir", static_dir, "Serve UI assets from here");
  serve->add_option("--threads", threads)->check(CLI::PositiveNumber);
  serve->add_option("--idle-minutes", idle_minutes)->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*bench) {
      if (config.empty() == from_records.empty()) {
        std::cerr << "bench: give either a config file or --from-records\n";
        return kExitUsage;
      }
      return cmd_bench(config, from_records, out_dir, records_dir, parallel, episodes);
    }
    if (*episode) return cmd_episode(task, seed, agent, params, sets, design_file, group, record_path, verbose);
    if (*replay) return cmd_replay(replay_files);
    if (*designs) return cmd_designs(designs_out, list);
    if (*serve) return cmd_serve(bind, port, static_dir, threads, idle_minutes);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

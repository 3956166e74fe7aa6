#include "mcon/bench.hpp"
#include "mcon/design_io.hpp"
#include "mcon/designs.hpp"
#include "mcon/replay.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <numeric>
#include <random>
#include <sstream>

using namespace mcon;
namespace fs = std::filesystem;

namespace {

// Knows its pose (GPS) and fills every cell left to right, bouncing at the walls.
class GpsFiller final : public Agent {
 public:
  std::string_view name() const override { return "gps-filler"; }
  void reset(const AgentContext& ctx) override {
    design_ = ctx.design;
    dir_ = Action::MoveRight;
  }
  Action act(const ObservationPacket& obs) override {
    const Pose p = *obs.pose;
    if (obs.offset(0, 0) < design_->target(0, p.x)) return Action::Drop;
    if (obs.offset(direction_of(dir_).dx, 0) == -1) dir_ = opposite(dir_);
    return dir_;
  }

 private:
  std::shared_ptr<const Design> design_;
  Action dir_ = Action::MoveRight;
};

EpisodeRecord sample_record(std::uint64_t seed, const std::string& task = "1d-static") {
  const auto& t = find_task(task);
  EnvConfig cfg = t.env_defaults();
  cfg.seed = seed;
  auto design = std::make_shared<const Design>(t.variant == Variant::Static ? generate(static_spec(t.family), cfg)
                                                                            : dynamic_test_groups(t.family, cfg)[0]);
  auto agent = make_agent("handcrafted");
  return run_episode(cfg, design, *agent, task);
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::string join(const std::vector<std::string>& lines) {
  std::string s;
  for (const auto& l : lines) s += l + "\n";
  return s;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("mcon_test_" + name);
  fs::remove_all(p);
  return p;
}

RunConfig small_run(const std::string& task, const std::string& agent, int episodes) {
  RunConfig rc;
  rc.task = task;
  rc.agent.name = agent;
  rc.n_episodes = episodes;
  rc.env_overrides = {{"N_smax", 60}};
  return rc;
}

}  // namespace

TEST(Record, TextRoundTrip) {
  const EpisodeRecord r = sample_record(4, "2d-dynamic");
  const std::string text = record_to_text(r);
  const EpisodeRecord back = record_from_text(text);
  EXPECT_EQ(back.steps, r.steps);
  EXPECT_EQ(back.cfg, r.cfg);
  EXPECT_EQ(back.design, r.design);
  EXPECT_EQ(back.iou, r.iou);
  EXPECT_EQ(record_to_text(back), text);
  EXPECT_EQ(lines_of(text).size(), r.steps.size() + 2);
}

TEST(Record, ConfigHashIgnoresNothingButSeed) {
  EnvConfig a = EnvConfig::defaults(Dimensionality::D2), b = a;
  b.gps = true;
  EXPECT_NE(config_hash(a), config_hash(b));
  EXPECT_NE(bench_config_hash(a, "random", {}), bench_config_hash(b, "random", {}));
  b = a;
  b.seed = 77;
  EXPECT_NE(config_hash(a), config_hash(b));
  EXPECT_EQ(bench_config_hash(a, "random", {}), bench_config_hash(b, "random", {}));
  EXPECT_NE(bench_config_hash(a, "random", {}), bench_config_hash(a, "greedy", {}));
}

TEST(Replay, VerifiesGenuineRecords) {
  for (const char* task : {"1d-static", "2d-static-sparse", "3d-dynamic"}) {
    const ReplayVerdict v = replay_text(record_to_text(sample_record(9, task)));
    EXPECT_TRUE(v.ok()) << task << ": " << v.message;
  }
}

TEST(Replay, TamperedRewardFailsAtThatStep) {
  const EpisodeRecord r = sample_record(3);
  auto lines = lines_of(record_to_text(r));
  const std::size_t k = 5;
  auto step = nlohmann::json::parse(lines[k + 1]);
  step["reward"] = step["reward"].get<int>() + 1;
  lines[k + 1] = step.dump();
  const ReplayVerdict v = replay_text(join(lines));
  EXPECT_EQ(v.status, ReplayStatus::Fail);
  ASSERT_TRUE(v.step.has_value());
  EXPECT_EQ(*v.step, k);
}

TEST(Replay, FooterTamperCaughtByDigest) {
  auto lines = lines_of(record_to_text(sample_record(3)));
  auto footer = nlohmann::json::parse(lines.back());
  footer["digest"] = "fnv1a64:0000000000000000";
  lines.back() = footer.dump();
  EXPECT_EQ(replay_text(join(lines)).status, ReplayStatus::Fail);
}

TEST(Replay, IncompatibleHeader) {
  auto lines = lines_of(record_to_text(sample_record(3)));
  auto header = nlohmann::json::parse(lines.front());
  header["config_hash"] = "fnv1a64:1234";
  auto bad_hash = lines;
  bad_hash.front() = header.dump();
  EXPECT_EQ(replay_text(join(bad_hash)).status, ReplayStatus::Incompatible);
  header = nlohmann::json::parse(lines.front());
  header["format"] = "mcon-episode/99";
  auto bad_format = lines;
  bad_format.front() = header.dump();
  EXPECT_EQ(replay_text(join(bad_format)).status, ReplayStatus::Incompatible);
}

TEST(Replay, MalformedInput) {
  EXPECT_EQ(replay_text("").status, ReplayStatus::Malformed);
  EXPECT_EQ(replay_text("not json\n").status, ReplayStatus::Malformed);
  auto lines = lines_of(record_to_text(sample_record(3)));
  lines.pop_back();
  EXPECT_EQ(replay_text(join(lines)).status, ReplayStatus::Malformed);
  EXPECT_EQ(replay("/nonexistent/record.jsonl").status, ReplayStatus::Malformed);
}

TEST(Episode, DeterministicRecords) {
  EXPECT_EQ(record_to_text(sample_record(21, "2d-static-dense")), record_to_text(sample_record(21, "2d-static-dense")));
  EXPECT_NE(record_to_text(sample_record(21, "2d-static-dense")), record_to_text(sample_record(22, "2d-static-dense")));
}

TEST(Episode, ScriptedOptimalScoresOne) {
  EnvConfig cfg = EnvConfig::defaults(Dimensionality::D1);
  cfg.gps = true;
  cfg.fixed_step = true;
  auto design = std::make_shared<const Design>(generate(static_spec(Family::Gaussian1D), cfg));
  std::vector<EpisodeRecord> records;
  for (std::uint64_t s = 0; s < 20; ++s) {
    cfg.seed = s;
    GpsFiller agent;
    records.push_back(run_episode(cfg, design, agent, "1d-static"));
    EXPECT_EQ(records.back().done_reason, DoneReason::BrickBudget);
  }
  const BenchResult r = aggregate(records);
  EXPECT_EQ(r.avg_iou, 1.0);
  EXPECT_EQ(r.min_iou, 1.0);
}

TEST(Bench, SerialEqualsParallel) {
  RunConfig rc = small_run("2d-static-sparse", "handcrafted", 12);
  const BenchResult serial = run_bench(rc);
  rc.parallelism = 4;
  const BenchResult parallel = run_bench(rc);
  EXPECT_EQ(serial.ious, parallel.ious);
  EXPECT_EQ(report_csv(std::span(&serial, 1)), report_csv(std::span(&parallel, 1)));
  EXPECT_EQ(report_json(std::span(&serial, 1)), report_json(std::span(&parallel, 1)));
}

TEST(Bench, AggregationIsOrderIndependent) {
  std::vector<EpisodeRecord> recs;
  for (std::uint64_t s = 0; s < 15; ++s) recs.push_back(sample_record(s, "1d-dynamic"));
  const BenchResult a = aggregate(recs);
  std::mt19937 shuffle_rng(1);
  std::shuffle(recs.begin(), recs.end(), shuffle_rng);
  const BenchResult b = aggregate(recs);
  EXPECT_EQ(a.avg_iou, b.avg_iou);
  EXPECT_EQ(a.min_iou, b.min_iou);
  EXPECT_EQ(a.done_reasons, b.done_reasons);
  auto sa = a.ious, sb = b.ious;
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  EXPECT_EQ(sa, sb);
}

TEST(Bench, DynamicRunCoversEveryGroup) {
  const BenchResult r = run_bench(small_run("1d-dynamic", "handcrafted", 3));
  ASSERT_EQ(r.ious.size(), 30u);
  ASSERT_EQ(r.groups.size(), 10u);
  double weighted = 0;
  for (std::size_t g = 0; g < r.groups.size(); ++g) {
    EXPECT_EQ(r.groups[g].group_id, static_cast<int>(g));
    EXPECT_EQ(r.groups[g].episodes, 3);
    weighted += r.groups[g].avg_iou * r.groups[g].episodes;
    EXPECT_LE(r.min_iou, r.groups[g].min_iou);
  }
  EXPECT_NEAR(weighted / 30.0, r.avg_iou, 1e-12);
  EXPECT_EQ(r.min_iou, *std::min_element(r.ious.begin(), r.ious.end()));
}

TEST(Bench, StaticRunRejectsWrongVariant) {
  EXPECT_THROW(run_static(small_run("1d-dynamic", "random", 2)), ContractError);
  EXPECT_THROW(run_dynamic(small_run("1d-static", "random", 2)), ContractError);
}

TEST(Bench, RandomAgentFloorOnDenseTwoDim) {
  RunConfig rc;
  rc.task = "2d-static-dense";
  rc.agent.name = "random";
  rc.n_episodes = 500;
  const BenchResult r = run_bench(rc);
  EXPECT_EQ(r.ious.size(), 500u);
  EXPECT_LT(r.avg_iou, 0.2);
}

TEST(RunConfig, ParsesAndValidates) {
  const RunConfig rc = RunConfig::from_json(
      {{"task", "3d-dynamic"}, {"agent", {{"name", "handcrafted"}, {"params", {{"walk_paths", true}}}}}, {"n_groups", 4}});
  EXPECT_EQ(rc.task, "3d-dynamic");
  EXPECT_EQ(rc.agent.params["walk_paths"], true);
  EXPECT_EQ(rc.n_episodes, 200);
  EXPECT_EQ(rc.n_groups, 4);
  EXPECT_EQ(RunConfig::from_json({{"task", "1d-static"}}).n_episodes, 500);
  EXPECT_EQ(RunConfig::from_json({{"task", "1d-static"}, {"agent", "random"}}).agent.name, "random");
  EXPECT_THROW(RunConfig::from_json({{"task", "1d-dynamic"}, {"n_groups", 11}}), ContractError);
  EXPECT_THROW(RunConfig::from_json({{"task", "1d-static"}, {"parallelism", 0}}), ContractError);
  EXPECT_THROW(RunConfig::from_json({{"task", "5d"}}), ContractError);
  // The task fixes variant and density whatever the overrides say.
  RunConfig o = RunConfig::from_json({{"task", "2d-static-sparse"}, {"env", {{"variant", "dynamic"}}}});
  EXPECT_EQ(o.env().variant, Variant::Static);
  EXPECT_EQ(o.env().density, Density::Sparse);
}

TEST(Report, SingleRunCsvShape) {
  const BenchResult r = run_bench(small_run("1d-static", "greedy", 4));
  const auto lines = lines_of(report_csv(std::span(&r, 1)));
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_EQ(lines[0],
            "task,agent,config_hash,episodes,avg_iou,min_iou,min_group_avg_iou,step_budget,brick_budget,immobilized,valid");
  EXPECT_EQ(lines[1].rfind("1d-static,greedy,fnv1a64:", 0), 0u);
}

TEST(Report, FullMatrixAndReemissionFromRecords) {
  const fs::path records = scratch("records"), direct = scratch("direct"), again = scratch("again");
  // Records regroup in catalog task order, then agent name order.
  std::vector<BenchResult> results;
  for (const auto& t : all_tasks())
    for (const char* agent : {"greedy", "handcrafted", "random"}) {
      RunConfig rc = small_run(t.name, agent, 2);
      rc.n_groups = 2;
      rc.records_dir = records;
      results.push_back(run_bench(rc));
    }
  const auto lines = lines_of(report_csv(results));
  EXPECT_EQ(lines.size(), 25u);
  emit_report(results, direct);
  const auto rebuilt = results_from_records(records);
  ASSERT_EQ(rebuilt.size(), 24u);
  emit_report(rebuilt, again);
  EXPECT_EQ(read_text_file(direct / "results.csv"), read_text_file(again / "results.csv"));
  EXPECT_EQ(read_text_file(direct / "results.json"), read_text_file(again / "results.json"));
  for (const auto& entry : fs::directory_iterator(records)) ASSERT_TRUE(replay(entry.path()).ok()) << entry.path();
  EXPECT_THROW(emit_report(std::vector<BenchResult>{}, again), ContractError);
  fs::remove_all(records);
  fs::remove_all(direct);
  fs::remove_all(again);
}

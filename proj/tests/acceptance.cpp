// Acceptance runner: one PASS/FAIL line per benchmark criterion, non-zero exit on any FAIL.

#include "oracles.hpp"

#include "mcon/bench.hpp"
#include "mcon/design_io.hpp"
#include "mcon/designs.hpp"
#include "mcon/handcrafted.hpp"
#include "mcon/replay.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <thread>

using namespace mcon;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void criterion(const std::string& name, double limit_seconds, const std::function<Verdict()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs > limit_seconds) {
    v.pass = false;
    v.detail += " [over time limit " + std::to_string(static_cast<int>(limit_seconds)) + "s]";
  }
  if (!v.pass) ++failures;
  std::printf("%s %s: %s (%.1fs)\n", v.pass ? "PASS" : "FAIL", name.c_str(), v.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

int workers() { return std::max(1u, std::thread::hardware_concurrency()); }

RunConfig run_of(const std::string& task, int episodes, nlohmann::json env = nlohmann::json::object()) {
  RunConfig rc;
  rc.task = task;
  rc.n_episodes = episodes;
  rc.env_overrides = std::move(env);
  rc.parallelism = workers();
  return rc;
}

std::shared_ptr<const Design> design_for(const TaskDescriptor& t, const EnvConfig& cfg, std::uint64_t seed) {
  if (t.variant == Variant::Static) return std::make_shared<const Design>(generate(static_spec(t.family), cfg));
  return std::make_shared<const Design>(dynamic_test_groups(t.family, cfg)[seed % 10]);
}

// ---------------------------------------------------------------------------

Verdict iou_oracle() {
  long long checked = 0;
  // Every pair of binary grids for shapes up to 9 cells; every grid of the larger shapes
  // (3x4, 4x3, 4x4) against itself, its complement, the empty grid and 24 seeded partners.
  Rng rng(2024);
  for (int r = 1; r <= 4; ++r)
    for (int c = 1; c <= 4; ++c) {
      const int n = r * c;
      const int count = 1 << n;
      for (int ma = 0; ma < count; ++ma) {
        CellGrid a(r, c);
        for (int k = 0; k < n; ++k) a(k) = (ma >> k) & 1;
        auto check = [&](int mb) {
          CellGrid b(r, c);
          for (int k = 0; k < n; ++k) b(k) = (mb >> k) & 1;
          ++checked;
          return iou(a, b) == oracle::iou_by_sets(a, b) && iou(a, b) == oracle::iou_by_sums(a, b);
        };
        if (n <= 9) {
          for (int mb = 0; mb < count; ++mb)
            if (!check(mb)) return {false, "binary mismatch at " + std::to_string(r) + "x" + std::to_string(c)};
        } else {
          if (!check(ma) || !check(~ma & (count - 1)) || !check(0)) return {false, "binary mismatch (large shape)"};
          for (int k = 0; k < 24; ++k)
            if (!check(static_cast<int>(uniform_below(rng, count)))) return {false, "binary mismatch (large shape)"};
        }
      }
    }
  for (int i = 0; i < 500; ++i) {
    const int r = uniform_int(rng, 1, 20), c = uniform_int(rng, 1, 20);
    CellGrid a(r, c), b(r, c);
    for (int k = 0; k < a.size(); ++k) {
      a(k) = uniform_int(rng, 0, 8);
      b(k) = uniform_int(rng, 0, 8);
    }
    ++checked;
    if (iou(a, b) != oracle::iou_by_sums(a, b)) return {false, "height grid mismatch at trial " + std::to_string(i)};
  }
  return {true, std::to_string(checked) + " grid pairs equal to both oracles"};
}

Verdict determinism() {
  int records = 0;
  for (const auto& t : all_tasks())
    for (const char* agent : {"handcrafted", "random", "greedy"})
      for (std::uint64_t seed = 0; seed < 4; ++seed) {
        EnvConfig cfg = t.env_defaults();
        cfg.seed = 1000 + seed;
        const auto design = design_for(t, cfg, seed);
        auto a1 = make_agent(agent), a2 = make_agent(agent);
        if (record_to_text(run_episode(cfg, design, *a1, t.name)) != record_to_text(run_episode(cfg, design, *a2, t.name)))
          return {false, t.name + "/" + agent + " record differs between runs"};
        ++records;
      }

  const fs::path root = fs::temp_directory_path() / "mcon_acceptance_determinism";
  fs::remove_all(root);
  int benches = 0;
  for (const auto& t : all_tasks()) {
    RunConfig rc = run_of(t.name, t.variant == Variant::Static ? 24 : 2);
    rc.parallelism = 1;
    rc.records_dir = root / "serial";
    const BenchResult serial = run_bench(rc);
    rc.parallelism = 8;
    rc.records_dir = root / "parallel";
    const BenchResult parallel = run_bench(rc);
    if (report_json(std::span(&serial, 1)) != report_json(std::span(&parallel, 1)))
      return {false, t.name + ": serial and parallel reports differ"};
    ++benches;
  }
  int files = 0;
  for (const auto& entry : fs::directory_iterator(root / "serial")) {
    const fs::path other = root / "parallel" / entry.path().filename();
    if (!fs::exists(other) || read_text_file(entry.path()) != read_text_file(other))
      return {false, "record file differs: " + entry.path().filename().string()};
    ++files;
  }
  fs::remove_all(root);
  return {true, std::to_string(records) + " record pairs byte-identical; " + std::to_string(benches) +
                    " serial vs 8-way benches identical (" + std::to_string(files) + " record files)"};
}

Verdict env_invariants() {
  Rng rng(77);
  long long steps = 0;
  int episodes = 0;
  const auto tasks = all_tasks();
  while (steps < 120000) {
    const auto& t = tasks[uniform_below(rng, tasks.size())];
    EnvConfig cfg = t.env_defaults();
    cfg.seed = rng();
    cfg.obstacles = t.dim == Dimensionality::D3 || (t.dim == Dimensionality::D2 && uniform_below(rng, 2) == 0);
    cfg.gps = uniform_below(rng, 2) == 0;
    cfg.fixed_step = uniform_below(rng, 4) == 0;
    cfg.d_max = uniform_int(rng, 1, cfg.half_window);
    cfg.n_smax = uniform_below(rng, 3) == 0 ? uniform_int(rng, 1, 200) : cfg.n_smax;
    const auto design = design_for(t, cfg, cfg.seed);
    // Landmarks go on empty design cells; 1D designs have few of those.
    const int empty = static_cast<int>((design->target == 0).count());
    cfg.n_landmarks = t.dim == Dimensionality::D1 ? uniform_int(rng, 1, 4) : 20;
    cfg.landmarks = uniform_below(rng, 3) == 0 && empty > cfg.n_landmarks;
    EnvState s = reset(cfg, design);
    const bool obstacles = obstacles_active(cfg);
    const auto legal = legal_actions(cfg.dim);
    int drops = 0;
    bool dropped_here = false;
    ++episodes;
    while (!s.done) {
      const Action a = legal[uniform_below(rng, legal.size())];
      const CellGrid before = s.grid.cells;
      const Pose pose_before = s.pose;
      const StepOutcome out = step(s, a, cfg);
      ++steps;
      const std::string where = t.name + " step " + std::to_string(s.n_steps);
      if (is_drop(a)) ++drops;
      if (s.pose != pose_before) dropped_here = false;
      if (is_drop(a) && cfg.dim == Dimensionality::D2) dropped_here = true;

      if (s.n_bricks != drops) return {false, "Nb != drop count at " + where};
      if (s.grid.cells.sum() > s.n_bricks) return {false, "more bricks on the grid than dropped at " + where};
      if ((s.grid.cells < before).any()) return {false, "cell height decreased at " + where};
      if (is_move(a) && (s.grid.cells != before).any()) return {false, "move changed the grid at " + where};
      if (is_drop(a) && s.grid.cells.sum() - before.sum() > 1) return {false, "drop added several bricks at " + where};
      if ((s.grid.landmarks && (s.grid.cells > 0)).any()) return {false, "brick on a landmark at " + where};
      if (cfg.dim == Dimensionality::D2 && (s.grid.cells > 1).any()) return {false, "2D cell above 1 at " + where};
      if (s.n_steps > cfg.n_smax || s.n_bricks > s.n_bmax) return {false, "budget exceeded at " + where};
      if (!s.grid.contains(s.pose.x, s.pose.y)) return {false, "pose out of bounds at " + where};
      if (obstacles) {
        if (s.grid.landmarks(s.pose.y, s.pose.x)) return {false, "robot on a landmark at " + where};
        // A 2D robot may stand on the brick it just dropped until it moves off.
        if (s.grid.cells(s.pose.y, s.pose.x) != 0 && !dropped_here) return {false, "robot on a brick at " + where};
        if (cfg.dim == Dimensionality::D3 && s.grid.cells(s.pose.y, s.pose.x) != 0)
          return {false, "3D robot on a brick at " + where};
      }
      const int r = out.reward;
      const bool reward_ok = is_move(a) ? r == 0
                             : cfg.dim == Dimensionality::D1 ? (r == -1 || r == 0 || r == 1 || r == 10)
                                                             : (r == 0 || r == 5);
      if (!reward_ok) return {false, "reward " + std::to_string(r) + " out of domain at " + where};
      if (out.sampled_distance < (is_move(a) ? 1 : 0) || out.sampled_distance > (is_move(a) ? cfg.d_max : 0))
        return {false, "sampled distance out of range at " + where};

      DoneReason expect = DoneReason::None;
      if (s.n_steps >= cfg.n_smax) expect = DoneReason::StepBudget;
      else if (s.n_bricks >= s.n_bmax) expect = DoneReason::BrickBudget;
      else if (is_immobilized(s, cfg)) expect = DoneReason::Immobilized;
      if (s.done != (expect != DoneReason::None) || s.done_reason != expect || out.done != s.done)
        return {false, "stop criterion mismatch at " + where};
    }
  }
  return {true, std::to_string(steps) + " random steps over " + std::to_string(episodes) + " episodes, all dimensions"};
}

Verdict handcrafted_band(const std::string& task, int episodes, double floor, double reference) {
  const BenchResult r = run_bench(run_of(task, episodes));
  const bool ok = r.valid && static_cast<int>(r.ious.size()) == (find_task(task).variant == Variant::Static ? episodes : 10 * episodes) &&
                  r.avg_iou >= floor;
  return {ok, "avg " + fmt("%.4f", r.avg_iou) + " min " + fmt("%.4f", r.min_iou) + " over " + std::to_string(r.ious.size()) +
                  " episodes (band >= " + fmt("%.2f", floor) + ", reference " + fmt("%.3f", reference) + ")"};
}

Verdict two_dim_static() {
  const BenchResult dense = run_bench(run_of("2d-static-dense", 500));
  const BenchResult sparse = run_bench(run_of("2d-static-sparse", 500));
  const bool ok = dense.valid && sparse.valid && dense.avg_iou >= 0.85 && sparse.avg_iou < dense.avg_iou;
  return {ok, "dense avg " + fmt("%.4f", dense.avg_iou) + " (band >= 0.85, reference 0.953); sparse avg " +
                  fmt("%.4f", sparse.avg_iou) + " < dense (reference 0.655)"};
}

Verdict ablations() {
  const int n = 500;
  const double base = run_bench(run_of("2d-static-sparse", n)).avg_iou;
  const double gps = run_bench(run_of("2d-static-sparse", n, {{"gps_enabled", true}})).avg_iou;
  const double fixed = run_bench(run_of("2d-static-sparse", n, {{"fixed_step_enabled", true}})).avg_iou;
  const double obstacles = run_bench(run_of("2d-static-sparse", n, {{"obstacle_enabled", true}})).avg_iou;
  const double landmarks = run_bench(run_of("2d-static-sparse", n, {{"landmarks_enabled", true}, {"n_landmarks", 20}})).avg_iou;
  const bool ok = gps >= base && fixed >= base && obstacles < base && landmarks >= base;
  return {ok, "2D sparse, " + std::to_string(n) + " paired episodes: base " + fmt("%.4f", base) + ", gps " + fmt("%.4f", gps) +
                  " (>=), fixed step " + fmt("%.4f", fixed) + " (>=), obstacles " + fmt("%.4f", obstacles) +
                  " (<), 20 landmarks " + fmt("%.4f", landmarks) + " (>=)"};
}

Verdict localization() {
  Rng rng(4242);
  long long anchored_checks = 0;
  const Dimensionality dims[] = {Dimensionality::D1, Dimensionality::D2, Dimensionality::D3};
  for (int walk = 0; walk < 10000; ++walk) {
    const Dimensionality dim = dims[walk % 3];
    EnvConfig cfg = EnvConfig::defaults(dim);
    cfg.d_max = 2;
    cfg.seed = rng();
    cfg.landmarks = walk % 5 == 0;
    Design d;
    d.dim = dim;
    // One target cell keeps the rest free for landmarks.
    d.target = CellGrid::Zero(cfg.height, cfg.width);
    d.target(0, 0) = 1;
    EnvState s = reset(cfg, std::make_shared<const Design>(d));
    if (dim == Dimensionality::D3)
      for (int y = 0; y < cfg.height; ++y)
        for (int x = 0; x < cfg.width; ++x)
          if (Pose{x, y} != s.pose && !s.grid.landmarks(y, x) && uniform_below(rng, 10) == 0) s.grid.cells(y, x) = 1;
    const WorldModel world{dim, cfg.width, cfg.height, cfg.d_max, obstacles_active(cfg), false};
    // Start from a wrong guess so anchoring, not the prior, must supply the coordinate.
    BeliefPose belief{{uniform_int(rng, 0, cfg.width - 1), uniform_int(rng, 0, cfg.height - 1)}, false};
    const auto moves = move_actions(dim);
    CellGrid prev = observe(s, cfg).window;
    for (int k = 0; k < 40 && !s.done; ++k) {
      const Action a = moves[uniform_below(rng, moves.size())];
      step(s, a, cfg);
      const CellGrid next = observe(s, cfg).window;
      belief = localize(belief, prev, next, a, world);
      const bool x_wall = (next.col(0) == -1).all() || (next.col(next.cols() - 1) == -1).all();
      const bool y_wall = next.rows() > 1 && ((next.row(0) == -1).all() || (next.row(next.rows() - 1) == -1).all());
      if (x_wall) {
        ++anchored_checks;
        if (belief.estimate.x != s.pose.x || !belief.anchored)
          return {false, "x anchoring wrong in walk " + std::to_string(walk)};
      }
      if (y_wall) {
        ++anchored_checks;
        if (belief.estimate.y != s.pose.y || !belief.anchored)
          return {false, "y anchoring wrong in walk " + std::to_string(walk)};
      }
      prev = next;
    }
  }
  return {anchored_checks > 0, "10000 random walks, " + std::to_string(anchored_checks) + " anchored coordinates all exact"};
}

Verdict replay_suite() {
  std::vector<std::string> texts;
  const auto tasks = all_tasks();
  const char* agents[] = {"handcrafted", "random", "greedy"};
  for (int i = 0; i < 100; ++i) {
    const auto& t = tasks[i % tasks.size()];
    EnvConfig cfg = t.env_defaults();
    cfg.seed = 5000 + i;
    auto agent = make_agent(agents[i % 3]);
    texts.push_back(record_to_text(run_episode(cfg, design_for(t, cfg, cfg.seed), *agent, t.name)));
    const ReplayVerdict v = replay_text(texts.back());
    if (!v.ok()) return {false, "record " + std::to_string(i) + " did not verify: " + v.message};
  }

  // Exhaustive single-byte tampering on short records, sampled positions on the rest.
  long long tampers = 0;
  auto tamper_detected = [&](const std::string& text, std::size_t pos, unsigned char value) {
    std::string bad = text;
    bad[pos] = static_cast<char>(value);
    ++tampers;
    return !replay_text(bad).ok();
  };
  for (const char* task : {"1d-static", "2d-static-sparse", "3d-dynamic"}) {
    const auto& t = find_task(task);
    EnvConfig cfg = t.env_defaults();
    cfg.seed = 99;
    cfg.n_smax = 25;
    auto agent = make_agent("handcrafted");
    const std::string text = record_to_text(run_episode(cfg, design_for(t, cfg, 99), *agent, task));
    for (std::size_t pos = 0; pos < text.size(); ++pos)
      for (unsigned char flip : {0x01, 0x20, 0x80}) {
        if (!tamper_detected(text, pos, static_cast<unsigned char>(text[pos]) ^ flip))
          return {false, std::string(task) + ": tamper at byte " + std::to_string(pos) + " not detected"};
      }
  }
  Rng rng(31337);
  for (const auto& text : texts)
    for (int k = 0; k < 40; ++k) {
      const std::size_t pos = uniform_below(rng, text.size());
      const unsigned char value = static_cast<unsigned char>(text[pos]) ^ static_cast<unsigned char>(uniform_int(rng, 1, 255));
      if (!tamper_detected(text, pos, value)) return {false, "sampled tamper at byte " + std::to_string(pos) + " not detected"};
    }
  return {true, "100 records verify OK; " + std::to_string(tampers) + " single-byte tampers all detected"};
}

}  // namespace

int main() {
  criterion("iou-oracle-equivalence", 10, iou_oracle);
  criterion("determinism", 60, determinism);
  criterion("env-invariants", 120, env_invariants);
  criterion("handcrafted-1d-static", 60, [] { return handcrafted_band("1d-static", 500, 0.90, 0.948); });
  criterion("handcrafted-1d-dynamic", 300, [] { return handcrafted_band("1d-dynamic", 200, 0.95, 0.995); });
  criterion("handcrafted-2d-static", 600, two_dim_static);
  criterion("ablation-directionality", 1200, ablations);
  criterion("localization-anchoring", 30, localization);
  criterion("replay-verification", 30, replay_suite);
  std::printf("%s: %d criteria failed\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
  return failures == 0 ? 0 : 1;
}

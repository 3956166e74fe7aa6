#include "mcon/play/service.hpp"

#include "mcon/design_io.hpp"
#include "mcon/designs.hpp"
#include "mcon/hash.hpp"

#include <random>

namespace mcon::play {

using nlohmann::json;

namespace {

std::uint64_t entropy() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

json window_json(const CellGrid& w) {
  json cells = json::array();
  for (Eigen::Index r = 0; r < w.rows(); ++r)
    for (Eigen::Index c = 0; c < w.cols(); ++c) cells.push_back(w(r, c));
  return {{"width", w.cols()}, {"height", w.rows()}, {"cells", std::move(cells)}};
}

}  // namespace

std::string_view to_string(Mode mode) { return mode == Mode::Training ? "training" : "evaluation"; }

Mode mode_from_string(std::string_view text) {
  if (text == "training") return Mode::Training;
  if (text == "evaluation") return Mode::Evaluation;
  throw PlayError("bad_request", "mode must be training or evaluation");
}

struct SessionManager::Session {
  std::mutex mutex;
  std::string id;
  Mode mode = Mode::Evaluation;
  const TaskDescriptor* task = nullptr;
  EnvConfig cfg;
  EnvState state;
  EpisodeRecord record;
  int cumulative_reward = 0;
  std::chrono::steady_clock::time_point created_at;
  std::chrono::steady_clock::time_point last_active;
  bool finished = false;
};

SessionManager::SessionManager(ServiceOptions options)
    : options_(std::move(options)),
      id_rng_(options_.id_seed.value_or(entropy())),
      seed_rng_(options_.seed_seed.value_or(entropy())) {}

SessionManager::~SessionManager() = default;

std::chrono::steady_clock::time_point SessionManager::now() const {
  return options_.clock ? options_.clock() : std::chrono::steady_clock::now();
}

std::string SessionManager::fresh_id() {
  // Caller holds mutex_.
  for (;;) {
    std::string id = hex64(id_rng_()) + hex64(id_rng_());
    if (!sessions_.contains(id)) return id;
  }
}

json SessionManager::error_frame(const std::string& code, const std::string& text) {
  return {{"type", "error"}, {"code", code}, {"text", text}};
}

json SessionManager::task_catalog() {
  json tasks = json::array();
  for (const auto& t : all_tasks()) {
    const EnvConfig cfg = t.env_defaults();
    tasks.push_back({{"name", t.name},
                     {"dim", std::string(to_string(t.dim))},
                     {"variant", std::string(to_string(t.variant))},
                     {"density", std::string(to_string(t.density))},
                     {"family", std::string(to_string(t.family))},
                     {"W", cfg.width},
                     {"H", cfg.height},
                     {"Ws", cfg.half_window},
                     {"actions", [&] {
                        json a = json::array();
                        for (Action act : legal_actions(t.dim)) a.push_back(std::string(to_string(act)));
                        return a;
                      }()}});
  }
  return {{"tasks", tasks}};
}

std::shared_ptr<SessionManager::Session> SessionManager::find(const std::string& id) {
  std::lock_guard lock(mutex_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw PlayError("not_found", "no session " + id);
  return it->second;
}

namespace {

// State frame under the session's visibility rules. Caller holds the session mutex.
template <class S>
json state_frame(const S& s, const ObservationPacket& obs, std::optional<int> reward) {
  json f = {{"type", "state"},
            {"session", s.id},
            {"task", s.task->name},
            {"mode", std::string(to_string(s.mode))},
            {"window", window_json(obs.window)},
            {"n_steps", obs.n_steps},
            {"n_bricks", obs.n_bricks}};
  if (obs.design) f["design"] = design_to_json(*obs.design);
  if (s.mode == Mode::Training) {
    if (reward) f["reward"] = *reward;
    f["cumulative_reward"] = s.cumulative_reward;
  }
  return f;
}

template <class S>
json end_frame(const S& s) {
  return {{"type", "episode_end"},
          {"session", s.id},
          {"iou", s.record.iou},
          {"done_reason", std::string(to_string(s.record.done_reason))},
          {"n_steps", s.state.n_steps},
          {"n_bricks", s.state.n_bricks},
          {"record", "/records/" + s.id}};
}

template <class S>
void finish(S& s) {
  s.finished = true;
  s.record.final_grid = s.state.grid.cells;
  s.record.iou = iou(s.state.grid, *s.state.design);
  s.record.done_reason = s.state.done_reason;
}

}  // namespace

std::vector<json> SessionManager::create(const std::string& task_name, Mode mode, std::optional<std::uint64_t> seed,
                                         std::string& bound) {
  const TaskDescriptor* task = nullptr;
  try {
    task = &find_task(task_name);
  } catch (const std::exception&) {
    return {error_frame("unknown_task", "unknown task " + task_name)};
  }

  auto s = std::make_shared<Session>();
  {
    std::lock_guard lock(mutex_);
    s->id = fresh_id();
    if (!seed) seed = seed_rng_();
  }
  s->mode = mode;
  s->task = task;
  s->cfg = task->env_defaults();
  s->cfg.seed = *seed;

  std::shared_ptr<const Design> design;
  if (task->variant == Variant::Static) {
    design = std::make_shared<const Design>(generate(static_spec(task->family), s->cfg));
  } else {
    auto groups = dynamic_test_groups(task->family, s->cfg);
    design = std::make_shared<const Design>(groups[derive_seed(*seed, 3) % groups.size()]);
  }
  s->state = reset(s->cfg, design);
  s->record.task = task->name;
  s->record.agent = "human";
  s->record.agent_params = {{"mode", std::string(to_string(mode))}};
  s->record.cfg = s->cfg;
  s->record.design = *design;
  s->record.initial_pose = s->state.pose;
  s->created_at = s->last_active = now();

  json frame = state_frame(*s, observe(s->state, s->cfg), std::nullopt);
  {
    std::lock_guard lock(mutex_);
    sessions_[s->id] = s;
  }
  bound = s->id;
  return {std::move(frame)};
}

std::vector<json> SessionManager::act(const std::string& id, Action action) {
  auto s = find(id);
  std::lock_guard lock(s->mutex);
  s->last_active = now();
  if (s->finished) return {error_frame("episode_over", "episode already ended")};
  if (!is_legal(action, s->cfg.dim))
    return {error_frame("illegal_action",
                        std::string(to_string(action)) + " is not legal in " + std::string(to_string(s->cfg.dim)))};
  StepOutcome out = step(s->state, action, s->cfg);
  s->cumulative_reward += out.reward;
  s->record.steps.push_back({s->state.n_steps, s->state.pose, action, out.sampled_distance, out.reward, s->state.n_bricks});
  std::vector<json> frames{state_frame(*s, out.observation, out.reward)};
  if (out.done) {
    finish(*s);
    frames.push_back(end_frame(*s));
  }
  return frames;
}

std::vector<json> SessionManager::resign(const std::string& id) {
  auto s = find(id);
  std::lock_guard lock(s->mutex);
  s->last_active = now();
  if (s->finished) return {error_frame("episode_over", "episode already ended")};
  s->state.done = true;
  s->state.done_reason = DoneReason::Resigned;
  finish(*s);
  return {end_frame(*s)};
}

std::vector<json> SessionManager::handle(std::string_view frame, std::string& bound) {
  const json msg = json::parse(frame, nullptr, false);
  if (msg.is_discarded() || !msg.is_object()) return {error_frame("bad_request", "frame is not a JSON object")};
  try {
    const auto type = msg.value("type", std::string());
    if (type == "create") {
      if (!msg.contains("task") || !msg["task"].is_string()) return {error_frame("bad_request", "create needs a task")};
      const Mode mode = mode_from_string(msg.value("mode", std::string("training")));
      std::optional<std::uint64_t> seed;
      if (msg.contains("seed")) {
        if (!msg["seed"].is_number_unsigned()) return {error_frame("bad_request", "seed must be a non-negative integer")};
        seed = msg["seed"].get<std::uint64_t>();
      }
      return create(msg["task"].get<std::string>(), mode, seed, bound);
    }
    if (type == "action" || type == "resign") {
      const std::string id = msg.contains("session") && msg["session"].is_string() ? msg["session"].get<std::string>() : bound;
      if (id.empty()) return {error_frame("no_session", "create a session first")};
      if (type == "resign") return resign(id);
      if (!msg.contains("action") || !msg["action"].is_string())
        return {error_frame("bad_request", "action frame needs an action")};
      Action action;
      try {
        action = action_from_string(msg["action"].get<std::string>());
      } catch (const ContractError& e) {
        return {error_frame("illegal_action", e.what())};
      }
      return act(id, action);
    }
    return {error_frame("bad_request", "unknown message type '" + type + "'")};
  } catch (const PlayError& e) {
    return {error_frame(e.code(), e.what())};
  } catch (const std::exception& e) {
    return {error_frame("internal", e.what())};
  }
}

EpisodeRecord SessionManager::record(const std::string& id) {
  auto s = find(id);
  std::lock_guard lock(s->mutex);
  if (!s->finished) throw PlayError("not_finished", "episode " + id + " is still running");
  return s->record;
}

std::string SessionManager::export_record(const std::string& id) { return record_to_text(record(id)); }

std::size_t SessionManager::expire_idle() {
  const auto t = now();
  std::lock_guard lock(mutex_);
  std::size_t removed = 0;
  for (auto it = sessions_.begin(); it != sessions_.end();) {
    bool idle;
    {
      std::lock_guard slock(it->second->mutex);
      idle = t - it->second->last_active > options_.idle_timeout;
    }
    if (idle) {
      it = sessions_.erase(it);
      ++removed;
    } else {
      ++it;
    }
  }
  return removed;
}

std::size_t SessionManager::session_count() const {
  std::lock_guard lock(mutex_);
  return sessions_.size();
}

}  // namespace mcon::play

#include "mcon/env.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <vector>

namespace mcon {

namespace {

struct ActionName {
  Action action;
  std::string_view name;
};

constexpr std::array<ActionName, 11> kActionNames{{
    {Action::MoveLeft, "MoveLeft"},
    {Action::MoveRight, "MoveRight"},
    {Action::MoveUp, "MoveUp"},
    {Action::MoveDown, "MoveDown"},
    {Action::MoveForward, "MoveForward"},
    {Action::MoveBackward, "MoveBackward"},
    {Action::Drop, "Drop"},
    {Action::DropLeft, "DropLeft"},
    {Action::DropRight, "DropRight"},
    {Action::DropFront, "DropFront"},
    {Action::DropRear, "DropRear"},
}};

constexpr std::array<Action, 3> kActions1D{Action::MoveLeft, Action::MoveRight, Action::Drop};
constexpr std::array<Action, 5> kActions2D{Action::MoveLeft, Action::MoveRight, Action::MoveUp, Action::MoveDown,
                                           Action::Drop};
constexpr std::array<Action, 8> kActions3D{Action::MoveLeft,  Action::MoveRight, Action::MoveForward,
                                           Action::MoveBackward, Action::DropLeft, Action::DropRight,
                                           Action::DropFront, Action::DropRear};

constexpr std::array<Action, 2> kMoves1D{Action::MoveLeft, Action::MoveRight};
constexpr std::array<Action, 4> kMoves2D{Action::MoveLeft, Action::MoveRight, Action::MoveUp, Action::MoveDown};
constexpr std::array<Action, 4> kMoves3D{Action::MoveLeft, Action::MoveRight, Action::MoveForward,
                                         Action::MoveBackward};

}  // namespace

std::string_view to_string(Action action) {
  for (const auto& entry : kActionNames)
    if (entry.action == action) return entry.name;
  return "?";
}

Action action_from_string(std::string_view text) {
  for (const auto& entry : kActionNames)
    if (entry.name == text) return entry.action;
  throw ContractError("unknown action: " + std::string(text));
}

std::span<const Action> legal_actions(Dimensionality dim) {
  switch (dim) {
    case Dimensionality::D1: return kActions1D;
    case Dimensionality::D2: return kActions2D;
    case Dimensionality::D3: return kActions3D;
  }
  return {};
}

std::span<const Action> move_actions(Dimensionality dim) {
  switch (dim) {
    case Dimensionality::D1: return kMoves1D;
    case Dimensionality::D2: return kMoves2D;
    case Dimensionality::D3: return kMoves3D;
  }
  return {};
}

bool is_legal(Action action, Dimensionality dim) {
  const auto legal = legal_actions(dim);
  return std::find(legal.begin(), legal.end(), action) != legal.end();
}

bool is_move(Action action) {
  switch (action) {
    case Action::MoveLeft:
    case Action::MoveRight:
    case Action::MoveUp:
    case Action::MoveDown:
    case Action::MoveForward:
    case Action::MoveBackward: return true;
    default: return false;
  }
}

bool is_drop(Action action) { return !is_move(action); }

Offset direction_of(Action action) {
  switch (action) {
    case Action::MoveLeft:
    case Action::DropLeft: return {-1, 0};
    case Action::MoveRight:
    case Action::DropRight: return {1, 0};
    case Action::MoveUp:
    case Action::MoveForward:
    case Action::DropFront: return {0, -1};
    case Action::MoveDown:
    case Action::MoveBackward:
    case Action::DropRear: return {0, 1};
    case Action::Drop: return {0, 0};
  }
  return {0, 0};
}

Action move_toward(Dimensionality dim, Offset dir) {
  if (dir.dx < 0) return Action::MoveLeft;
  if (dir.dx > 0) return Action::MoveRight;
  if (dir.dy < 0) return dim == Dimensionality::D3 ? Action::MoveForward : Action::MoveUp;
  if (dir.dy > 0) return dim == Dimensionality::D3 ? Action::MoveBackward : Action::MoveDown;
  throw ContractError("move_toward: zero direction");
}

Action drop_toward(Offset dir) {
  if (dir.dx < 0) return Action::DropLeft;
  if (dir.dx > 0) return Action::DropRight;
  if (dir.dy < 0) return Action::DropFront;
  if (dir.dy > 0) return Action::DropRear;
  throw ContractError("drop_toward: zero direction");
}

Action opposite(Action move) {
  switch (move) {
    case Action::MoveLeft: return Action::MoveRight;
    case Action::MoveRight: return Action::MoveLeft;
    case Action::MoveUp: return Action::MoveDown;
    case Action::MoveDown: return Action::MoveUp;
    case Action::MoveForward: return Action::MoveBackward;
    case Action::MoveBackward: return Action::MoveForward;
    default: throw ContractError("opposite: not a move action");
  }
}

std::string_view to_string(DoneReason reason) {
  switch (reason) {
    case DoneReason::None: return "none";
    case DoneReason::StepBudget: return "step_budget";
    case DoneReason::BrickBudget: return "brick_budget";
    case DoneReason::Immobilized: return "immobilized";
    case DoneReason::Resigned: return "resigned";
  }
  return "?";
}

DoneReason done_reason_from_string(std::string_view text) {
  for (auto r : {DoneReason::None, DoneReason::StepBudget, DoneReason::BrickBudget, DoneReason::Immobilized,
                 DoneReason::Resigned})
    if (to_string(r) == text) return r;
  throw ContractError("unknown done reason: " + std::string(text));
}

bool obstacles_active(const EnvConfig& cfg) { return cfg.obstacles && cfg.dim != Dimensionality::D1; }

bool blocks_motion(const GridState& grid, int x, int y, bool obstacles) {
  if (!grid.contains(x, y)) return true;
  return obstacles && (grid.cells(y, x) > 0 || grid.landmarks(y, x));
}

ObservationPacket observe(const EnvState& state, const EnvConfig& cfg) {
  ObservationPacket obs;
  obs.window = extract_window(state.grid.cells, state.grid.landmarks, state.pose, cfg.half_window);
  obs.n_steps = state.n_steps;
  obs.n_bricks = state.n_bricks;
  if (cfg.variant == Variant::Dynamic) obs.design = state.design;
  if (cfg.gps) obs.pose = state.pose;
  return obs;
}

EnvState reset(const EnvConfig& cfg, std::shared_ptr<const Design> design) {
  cfg.validate();
  if (!design) throw ContractError("reset: missing design");
  design->validate();
  if (design->dim != cfg.dim || design->width() != cfg.width || design->height() != cfg.height)
    throw ContractError("reset: design shape does not match the configured world");

  EnvState state;
  state.grid = GridState::empty(cfg.dim, cfg.width, cfg.height);
  state.design = std::move(design);
  state.rng = Rng(cfg.seed);

  const int n_cells = cfg.width * cfg.height;
  const int start = static_cast<int>(uniform_below(state.rng, static_cast<std::uint64_t>(n_cells)));
  state.pose = {start % cfg.width, start / cfg.width};

  if (cfg.landmarks && cfg.n_landmarks > 0) {
    // Separate stream so toggling landmarks leaves the pose and motion draws unchanged.
    Rng placement(derive_seed(cfg.seed, 1));
    std::vector<int> free;
    for (int idx = 0; idx < n_cells; ++idx) {
      const int x = idx % cfg.width;
      const int y = idx / cfg.width;
      if (state.design->target(y, x) == 0 && idx != start) free.push_back(idx);
    }
    if (static_cast<int>(free.size()) < cfg.n_landmarks)
      throw ContractError("reset: not enough empty design cells for the requested landmarks");
    for (int i = 0; i < cfg.n_landmarks; ++i) {
      const auto j = i + static_cast<int>(uniform_below(placement, free.size() - i));
      std::swap(free[i], free[j]);
      state.grid.landmarks(free[i] / cfg.width, free[i] % cfg.width) = true;
    }
  }

  const long long budget = state.design->brick_count();
  if (budget > std::numeric_limits<int>::max()) throw ContractError("reset: design too large");
  state.n_bmax = static_cast<int>(budget);
  return state;
}

int sample_distance(EnvState& state, const EnvConfig& cfg) {
  if (cfg.fixed_step) return 1;
  return uniform_int(state.rng, 1, cfg.d_max);
}

void apply_move(EnvState& state, Action direction, int d, const EnvConfig& cfg) {
  if (!is_move(direction) || !is_legal(direction, cfg.dim)) throw ContractError("apply_move: illegal direction");
  const Offset dir = direction_of(direction);
  const bool obstacles = obstacles_active(cfg);
  for (int i = 0; i < d; ++i) {
    const int nx = state.pose.x + dir.dx;
    const int ny = state.pose.y + dir.dy;
    if (blocks_motion(state.grid, nx, ny, obstacles)) break;
    state.pose = {nx, ny};
  }
  ++state.n_steps;
}

int apply_drop(EnvState& state, Action action, const EnvConfig& cfg) {
  if (!is_drop(action) || !is_legal(action, cfg.dim)) throw ContractError("apply_drop: illegal drop");
  auto& grid = state.grid;
  const auto& target = state.design->target;
  int reward = 0;

  switch (cfg.dim) {
    case Dimensionality::D1: {
      const auto [x, y] = state.pose;
      if (!grid.landmarks(y, x)) {
        const int h = ++grid.cells(y, x);
        const int want = target(y, x);
        reward = h == want ? 10 : (h < want ? 1 : -1);
      }
      break;
    }
    case Dimensionality::D2: {
      const auto [x, y] = state.pose;
      if (grid.cells(y, x) == 0 && !grid.landmarks(y, x)) {
        grid.cells(y, x) = 1;
        if (target(y, x) == 1) reward = 5;
      }
      break;
    }
    case Dimensionality::D3: {
      const Offset dir = direction_of(action);
      const int x = state.pose.x + dir.dx;
      const int y = state.pose.y + dir.dy;
      if (grid.contains(x, y) && !grid.landmarks(y, x)) {
        const int h = ++grid.cells(y, x);
        if (h <= target(y, x)) reward = 5;
      }
      break;
    }
  }

  ++state.n_bricks;
  ++state.n_steps;
  return reward;
}

bool is_immobilized(const EnvState& state, const EnvConfig& cfg) {
  if (!obstacles_active(cfg)) return false;
  for (Action move : move_actions(cfg.dim)) {
    const Offset dir = direction_of(move);
    if (!blocks_motion(state.grid, state.pose.x + dir.dx, state.pose.y + dir.dy, true)) return false;
  }
  return true;
}

StepOutcome step(EnvState& state, Action action, const EnvConfig& cfg) {
  if (state.done) throw std::logic_error("step: episode already finished");
  if (!is_legal(action, cfg.dim))
    throw ContractError("step: action " + std::string(to_string(action)) + " is illegal in " +
                        std::string(to_string(cfg.dim)));

  StepOutcome out;
  if (is_move(action)) {
    out.sampled_distance = sample_distance(state, cfg);
    apply_move(state, action, out.sampled_distance, cfg);
  } else {
    out.reward = apply_drop(state, action, cfg);
  }

  if (state.n_steps >= cfg.n_smax)
    state.done_reason = DoneReason::StepBudget;
  else if (state.n_bricks >= state.n_bmax)
    state.done_reason = DoneReason::BrickBudget;
  else if (is_immobilized(state, cfg))
    state.done_reason = DoneReason::Immobilized;
  state.done = state.done_reason != DoneReason::None;

  out.observation = observe(state, cfg);
  out.done = state.done;
  out.done_reason = state.done_reason;
  return out;
}

Environment::Environment(EnvConfig cfg, std::shared_ptr<const Design> design)
    : cfg_(std::move(cfg)), design_(std::move(design)), state_(mcon::reset(cfg_, design_)) {}

ObservationPacket Environment::reset() {
  state_ = mcon::reset(cfg_, design_);
  return observe(state_, cfg_);
}

StepOutcome Environment::step(Action action) { return mcon::step(state_, action, cfg_); }

}  // namespace mcon

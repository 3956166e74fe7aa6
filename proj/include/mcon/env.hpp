#pragma once

#include "mcon/config.hpp"
#include "mcon/grid.hpp"
#include "mcon/rng.hpp"

#include <memory>
#include <span>
#include <string_view>

namespace mcon {

// Up/Forward decrease y, Down/Backward increase y. DropFront targets y-1, DropRear y+1.
enum class Action {
  MoveLeft,
  MoveRight,
  MoveUp,
  MoveDown,
  MoveForward,
  MoveBackward,
  Drop,
  DropLeft,
  DropRight,
  DropFront,
  DropRear,
};

std::string_view to_string(Action action);
Action action_from_string(std::string_view text);

/// Legal action set for a dimensionality, in a fixed order.
std::span<const Action> legal_actions(Dimensionality dim);
/// The four (or two, in 1D) move actions for a dimensionality.
std::span<const Action> move_actions(Dimensionality dim);
bool is_legal(Action action, Dimensionality dim);
bool is_move(Action action);
bool is_drop(Action action);

/// Unit displacement of a move, or of the drop target relative to the robot.
struct Offset {
  int dx = 0;
  int dy = 0;
};
Offset direction_of(Action action);
/// Move action for a unit direction in the given dimensionality.
Action move_toward(Dimensionality dim, Offset dir);
/// D3 drop action aimed along a unit direction.
Action drop_toward(Offset dir);
Action opposite(Action move);

enum class DoneReason { None, StepBudget, BrickBudget, Immobilized, Resigned };

std::string_view to_string(DoneReason reason);
DoneReason done_reason_from_string(std::string_view text);

/// Full simulator state. Copyable; equality covers the generator state.
struct EnvState {
  GridState grid;
  Pose pose;
  int n_steps = 0;
  int n_bricks = 0;
  int n_bmax = 0;
  std::shared_ptr<const Design> design;
  Rng rng;
  bool done = false;
  DoneReason done_reason = DoneReason::None;

  friend bool operator==(const EnvState& a, const EnvState& b) {
    return a.grid == b.grid && a.pose == b.pose && a.n_steps == b.n_steps && a.n_bricks == b.n_bricks &&
           a.n_bmax == b.n_bmax && *a.design == *b.design && a.rng == b.rng && a.done == b.done &&
           a.done_reason == b.done_reason;
  }
};

struct StepOutcome {
  ObservationPacket observation;
  int reward = 0;
  bool done = false;
  DoneReason done_reason = DoneReason::None;
  int sampled_distance = 0;
};

/// True when bricks and landmarks block motion for this configuration.
bool obstacles_active(const EnvConfig& cfg);

/// Whether the cell at (x, y) stops a robot entering it.
bool blocks_motion(const GridState& grid, int x, int y, bool obstacles);

ObservationPacket observe(const EnvState& state, const EnvConfig& cfg);

/// Fresh episode: empty grid, seeded landmarks and initial pose, zero counters.
EnvState reset(const EnvConfig& cfg, std::shared_ptr<const Design> design);

int sample_distance(EnvState& state, const EnvConfig& cfg);

/// Walks up to `d` cells, stopping at walls and (if active) obstacles. Counts one step.
void apply_move(EnvState& state, Action direction, int d, const EnvConfig& cfg);

/// Places one brick per the dimension rules and returns the reward. Counts one step.
int apply_drop(EnvState& state, Action action, const EnvConfig& cfg);

/// True when no move direction is open (obstacles active only).
bool is_immobilized(const EnvState& state, const EnvConfig& cfg);

/// One POMDP transition. Throws std::logic_error after the episode ended and
/// ContractError for an action illegal in this dimensionality.
StepOutcome step(EnvState& state, Action action, const EnvConfig& cfg);

/// Owning reset/step wrapper.
class Environment {
 public:
  Environment(EnvConfig cfg, std::shared_ptr<const Design> design);

  ObservationPacket reset();
  StepOutcome step(Action action);

  const EnvConfig& config() const { return cfg_; }
  const EnvState& state() const { return state_; }
  const Design& design() const { return *design_; }

 private:
  EnvConfig cfg_;
  std::shared_ptr<const Design> design_;
  EnvState state_;
};

}  // namespace mcon

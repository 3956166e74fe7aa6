#pragma once

#include "mcon/agent.hpp"

#include <vector>

namespace mcon {

enum class MatchKind { Unique, Ambiguous, NoMatch };

struct MatchResult {
  MatchKind kind = MatchKind::NoMatch;
  int shift = 0;  // valid for Unique
};

/// Shift-and-compare of two successive windows along the executed move. Shift k is feasible
/// when the overlap agrees exactly; Unique needs exactly one feasible k in [1, d_max] and
/// windows that are not translation-ambiguous (identical, or both uniform).
MatchResult feature_match(const CellGrid& prev, const CellGrid& next, Action direction, int d_max);

struct BeliefPose {
  Pose estimate;
  bool anchored = false;
};

/// Static facts the agent knows about the world it acts in.
struct WorldModel {
  Dimensionality dim = Dimensionality::D1;
  int width = 0;
  int height = 1;
  int d_max = 1;
  bool obstacles = false;
  bool walk_paths = false;  // cost candidates by in-window walking distance when obstacles block
};

/// Pins each coordinate whose wall is visible as -1 padding in `window`.
BeliefPose anchor_to_walls(BeliefPose belief, const CellGrid& window, const WorldModel& world);

/// Odometry update after a move: matched shift when unique, one cell otherwise, zero when the
/// first cell along the move was visibly blocked. Boundary sightings then re-anchor the estimate.
BeliefPose localize(const BeliefPose& belief, const CellGrid& prev, const CellGrid& next, Action action,
                    const WorldModel& world);

/// Ordered exploratory moves driving a boustrophedon sweep. `order.front()` is the sweep head.
struct PriorityActionSpace {
  std::vector<Action> order;
  Action horizontal = Action::MoveRight;
  Action vertical = Action::MoveDown;
  bool vertical_phase = false;
  int phase_start = 0;
  int stride = 1;

  static PriorityActionSpace initial(Dimensionality dim, int stride);
};

struct PlanResult {
  Action action;
  PriorityActionSpace prior;
  bool exploratory = false;  // no candidate in view; action is the sweep head
};

/// Nearest-candidate planning over the current window, falling back to the sweep head.
PlanResult plan(const BeliefPose& belief, const ObservationPacket& obs, const Design& design,
                const PriorityActionSpace& prior, const WorldModel& world);

/// 3D guard: replaces a drop that would leave no open move with the first open move in `prior`.
Action safe_drop_filter(const ObservationPacket& obs, Action proposed, const PriorityActionSpace& prior,
                        const WorldModel& world);

struct HandcraftedParams {
  bool safe_drop = true;        // 3D with obstacles only
  bool random_explore = false;  // sample the exploratory move from the priority order
  int sweep_stride = 0;         // 0: use the half window
  bool use_gps = true;          // trust the pose in the packet when the env provides it
  bool walk_paths = false;      // obstacle-aware candidate costs instead of Manhattan distance
};

class HandcraftedAgent final : public Agent {
 public:
  explicit HandcraftedAgent(HandcraftedParams params = {}) : params_(params) {}

  std::string_view name() const override { return "handcrafted"; }
  nlohmann::json params() const override;
  void reset(const AgentContext& ctx) override;
  Action act(const ObservationPacket& obs) override;

  const BeliefPose& belief() const { return belief_; }
  const PriorityActionSpace& prior() const { return prior_; }

 private:
  HandcraftedParams params_;
  AgentContext ctx_;
  WorldModel world_;
  BeliefPose belief_;
  PriorityActionSpace prior_;
  CellGrid prev_window_;
  std::optional<Action> last_action_;
  Rng rng_;
  bool started_ = false;
};

HandcraftedParams handcrafted_params_from_json(const nlohmann::json& j);

}  // namespace mcon

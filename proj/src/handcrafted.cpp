#include "mcon/handcrafted.hpp"

#include <cstdlib>
#include <optional>
#include <vector>

namespace mcon {

namespace {

bool is_uniform(const CellGrid& w) { return (w == w(0, 0)).all(); }

// Window value next to the robot in the direction of a move.
int neighbour_value(const ObservationPacket& obs, Action move) {
  const Offset d = direction_of(move);
  return obs.offset(d.dx, d.dy);
}

bool cell_blocks(int value, bool obstacles) {
  if (value == kOutsideCell) return true;
  return obstacles && (value > 0 || value == kLandmarkCell);
}

bool is_open(const ObservationPacket& obs, Action move, bool obstacles) {
  return !cell_blocks(neighbour_value(obs, move), obstacles);
}

bool reduces(Action move, int dx, int dy) {
  const Offset d = direction_of(move);
  return (d.dx != 0 && d.dx * dx > 0) || (d.dy != 0 && d.dy * dy > 0);
}

int count_outside_prefix(const CellGrid& w, bool columns, bool from_start) {
  const Eigen::Index n = columns ? w.cols() : w.rows();
  int count = 0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index idx = from_start ? k : n - 1 - k;
    const bool outside = columns ? (w.col(idx) == kOutsideCell).all() : (w.row(idx) == kOutsideCell).all();
    if (!outside) break;
    ++count;
  }
  return count;
}

// Free cells the robot could have entered along `move`, read from the pre-move window.
int free_run(const CellGrid& prev, Action move, int limit, bool obstacles) {
  const Offset d = direction_of(move);
  const int c = static_cast<int>(prev.cols() / 2);
  const bool one_row = prev.rows() == 1;
  int run = 0;
  for (int k = 1; k <= limit; ++k) {
    const int col = c + d.dx * k;
    const int row = one_row ? 0 : c + d.dy * k;
    if (col < 0 || row < 0 || col >= prev.cols() || row >= prev.rows()) break;
    if (cell_blocks(prev(row, col), obstacles)) break;
    ++run;
  }
  return run;
}

Pose clamp_pose(Pose p, const WorldModel& world) {
  p.x = std::clamp(p.x, 0, world.width - 1);
  p.y = std::clamp(p.y, 0, world.height - 1);
  return p;
}

std::vector<Action> make_order(Action head, Action other) { return {head, other, opposite(head), opposite(other)}; }

PriorityActionSpace update_sweep(PriorityActionSpace p, const BeliefPose& belief, const ObservationPacket& obs,
                                 const WorldModel& world) {
  auto contact = [&](Action a) { return !is_open(obs, a, world.obstacles); };
  if (world.dim == Dimensionality::D1) {
    if (contact(p.horizontal)) p.horizontal = opposite(p.horizontal);
    p.order = {p.horizontal, opposite(p.horizontal)};
    return p;
  }
  if (!p.vertical_phase) {
    if (contact(p.horizontal)) {
      p.vertical_phase = true;
      p.phase_start = belief.estimate.y;
      p.horizontal = opposite(p.horizontal);
      if (contact(p.vertical)) p.vertical = opposite(p.vertical);
    }
  } else if (contact(p.vertical)) {
    p.vertical = opposite(p.vertical);
    p.vertical_phase = false;
  } else if (std::abs(belief.estimate.y - p.phase_start) >= p.stride) {
    p.vertical_phase = false;
  }
  p.order = p.vertical_phase ? make_order(p.vertical, p.horizontal) : make_order(p.horizontal, p.vertical);
  return p;
}

Action first_open(const ObservationPacket& obs, const PriorityActionSpace& prior, bool obstacles) {
  for (Action a : prior.order)
    if (is_open(obs, a, obstacles)) return a;
  return prior.order.front();
}

}  // namespace

MatchResult feature_match(const CellGrid& prev, const CellGrid& next, Action direction, int d_max) {
  if (prev.rows() != next.rows() || prev.cols() != next.cols())
    throw ContractError("feature_match: window shapes differ");
  const Offset d = direction_of(direction);
  const Eigen::Index span = d.dx != 0 ? prev.cols() : prev.rows();

  int feasible = 0;
  int shift = 0;
  for (int k = 1; k <= d_max && k < span; ++k) {
    const Eigen::Index keep = span - k;
    bool agree = false;
    if (d.dx > 0) agree = (next.leftCols(keep) == prev.rightCols(keep)).all();
    else if (d.dx < 0) agree = (next.rightCols(keep) == prev.leftCols(keep)).all();
    else if (d.dy > 0) agree = (next.topRows(keep) == prev.bottomRows(keep)).all();
    else agree = (next.bottomRows(keep) == prev.topRows(keep)).all();
    if (agree) {
      ++feasible;
      shift = k;
    }
  }

  if (feasible == 0) return {MatchKind::NoMatch, 0};
  const bool translation_ambiguous = (prev == next).all() || (is_uniform(prev) && is_uniform(next));
  if (feasible > 1 || translation_ambiguous) return {MatchKind::Ambiguous, 0};
  return {MatchKind::Unique, shift};
}

BeliefPose anchor_to_walls(BeliefPose belief, const CellGrid& window, const WorldModel& world) {
  const int ws = static_cast<int>(window.cols() / 2);
  if (const int left = count_outside_prefix(window, true, true); left > 0) {
    belief.estimate.x = ws - left;
    belief.anchored = true;
  } else if (const int right = count_outside_prefix(window, true, false); right > 0) {
    belief.estimate.x = world.width - 1 - ws + right;
    belief.anchored = true;
  }
  if (window.rows() > 1) {
    if (const int top = count_outside_prefix(window, false, true); top > 0) {
      belief.estimate.y = ws - top;
      belief.anchored = true;
    } else if (const int bottom = count_outside_prefix(window, false, false); bottom > 0) {
      belief.estimate.y = world.height - 1 - ws + bottom;
      belief.anchored = true;
    }
  }
  belief.estimate = clamp_pose(belief.estimate, world);
  return belief;
}

BeliefPose localize(const BeliefPose& belief, const CellGrid& prev, const CellGrid& next, Action action,
                    const WorldModel& world) {
  if (!is_move(action)) throw ContractError("localize: action is not a move");
  const int reachable = free_run(prev, action, world.d_max, world.obstacles);
  int shift = 0;
  if (reachable > 0) {
    const MatchResult m = feature_match(prev, next, action, reachable);
    shift = m.kind == MatchKind::Unique ? m.shift : 1;
  }
  const Offset d = direction_of(action);
  BeliefPose out = belief;
  out.estimate = clamp_pose({belief.estimate.x + d.dx * shift, belief.estimate.y + d.dy * shift}, world);
  return anchor_to_walls(out, next, world);
}

PriorityActionSpace PriorityActionSpace::initial(Dimensionality dim, int stride) {
  PriorityActionSpace p;
  p.stride = std::max(1, stride);
  p.horizontal = Action::MoveRight;
  if (dim == Dimensionality::D1) {
    p.order = {Action::MoveRight, Action::MoveLeft};
  } else {
    p.vertical = dim == Dimensionality::D3 ? Action::MoveBackward : Action::MoveDown;
    p.order = make_order(p.horizontal, p.vertical);
  }
  return p;
}

namespace {

// Walking distance from the window centre to every window cell, and the first move of a
// shortest path. Moves are expanded in priority order so ties follow the sweep.
struct WindowPaths {
  CellGrid dist;
  std::vector<Action> first;
};

WindowPaths window_paths(const ObservationPacket& obs, const std::vector<Action>& moves, bool obstacles) {
  const auto rows = obs.window.rows(), cols = obs.window.cols();
  const int ws = obs.half_window();
  const Eigen::Index cr = rows == 1 ? 0 : ws, cc = ws;
  WindowPaths out{CellGrid::Constant(rows, cols, -1), std::vector<Action>(rows * cols, Action::Drop)};
  std::vector<std::pair<Eigen::Index, Eigen::Index>> queue{{cr, cc}};
  out.dist(cr, cc) = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const auto [r, c] = queue[head];
    for (Action a : moves) {
      const Offset d = direction_of(a);
      const Eigen::Index nr = r + d.dy, nc = c + d.dx;
      if (nr < 0 || nc < 0 || nr >= rows || nc >= cols || out.dist(nr, nc) >= 0) continue;
      if (cell_blocks(obs.window(nr, nc), obstacles)) continue;
      out.dist(nr, nc) = out.dist(r, c) + 1;
      out.first[nr * cols + nc] = head == 0 ? a : out.first[r * cols + c];
      queue.emplace_back(nr, nc);
    }
  }
  return out;
}

}  // namespace

PlanResult plan(const BeliefPose& belief, const ObservationPacket& obs, const Design& design,
                const PriorityActionSpace& prior_in, const WorldModel& world) {
  PriorityActionSpace prior = update_sweep(prior_in, belief, obs, world);
  const int ws = obs.half_window();
  const bool one_row = obs.window.rows() == 1;
  const bool d3 = world.dim == Dimensionality::D3;

  auto rank_of = [&](int dx, int dy) {
    for (std::size_t r = 0; r < prior.order.size(); ++r)
      if (reduces(prior.order[r], dx, dy)) return static_cast<int>(r);
    return 0;
  };

  // With obstacles, bricks wall the robot in; cost candidates by walking distance instead.
  std::optional<WindowPaths> paths;
  if (world.obstacles && world.walk_paths) paths = window_paths(obs, prior.order, true);
  const auto wcols = obs.window.cols();

  bool found = false;
  int best_cost = 0, best_rank = 0, best_dx = 0, best_dy = 0;
  Eigen::Index best_r = 0, best_c = 0;
  for (Eigen::Index row = 0; row < obs.window.rows(); ++row) {
    for (Eigen::Index col = 0; col < obs.window.cols(); ++col) {
      const int v = obs.window(row, col);
      if (v < 0) continue;
      const int dx = static_cast<int>(col) - ws;
      const int dy = one_row ? 0 : static_cast<int>(row) - ws;
      const int wx = belief.estimate.x + dx;
      const int wy = belief.estimate.y + dy;
      if (wx < 0 || wy < 0 || wx >= design.width() || wy >= design.height()) continue;
      const int want = design.target(wy, wx);
      const bool need = world.dim == Dimensionality::D2 ? (want == 1 && v == 0) : v < want;
      if (!need) continue;
      const int dist = std::abs(dx) + std::abs(dy);
      // 3D drops land on a neighbour, so the robot wants to be adjacent, not on top.
      int cost = d3 ? (dist == 0 ? 2 : dist - 1) : dist;
      Eigen::Index via_r = row, via_c = col;
      if (paths) {
        cost = -1;
        if (!d3) {
          cost = paths->dist(row, col);
        } else {
          for (Action a : prior.order) {
            const Offset d = direction_of(a);
            const Eigen::Index nr = row + d.dy, nc = col + d.dx;
            if (nr < 0 || nc < 0 || nr >= obs.window.rows() || nc >= wcols) continue;
            const int c = paths->dist(nr, nc);
            if (c >= 0 && (cost < 0 || c < cost)) {
              cost = c;
              via_r = nr;
              via_c = nc;
            }
          }
        }
        if (cost < 0) continue;
      }
      const int rank = rank_of(dx, dy);
      if (!found || cost < best_cost || (cost == best_cost && rank < best_rank)) {
        found = true;
        best_cost = cost;
        best_rank = rank;
        best_dx = dx;
        best_dy = dy;
        best_r = via_r;
        best_c = via_c;
      }
    }
  }

  if (!found) return {prior.order.front(), prior, true};

  if (paths) {
    if (best_cost == 0)
      return {d3 ? drop_toward({best_dx, best_dy}) : Action::Drop, prior};
    return {paths->first[best_r * wcols + best_c], prior};
  }

  const int dist = std::abs(best_dx) + std::abs(best_dy);
  if (!d3 && dist == 0) return {Action::Drop, prior};
  if (d3 && dist == 1) return {drop_toward({best_dx, best_dy}), prior};
  if (d3 && dist == 0) return {first_open(obs, prior, world.obstacles), prior};

  for (Action a : prior.order)
    if (reduces(a, best_dx, best_dy) && is_open(obs, a, world.obstacles)) return {a, prior};
  return {first_open(obs, prior, world.obstacles), prior};
}

Action safe_drop_filter(const ObservationPacket& obs, Action proposed, const PriorityActionSpace& prior,
                        const WorldModel& world) {
  if (world.dim != Dimensionality::D3 || !world.obstacles || !is_drop(proposed)) return proposed;
  const Offset target = direction_of(proposed);
  const bool target_buildable = obs.offset(target.dx, target.dy) >= 0;
  int open_before = 0, open_after = 0;
  for (Action move : move_actions(world.dim)) {
    if (!is_open(obs, move, true)) continue;
    ++open_before;
    const Offset d = direction_of(move);
    if (!(target_buildable && d.dx == target.dx && d.dy == target.dy)) ++open_after;
  }
  if (open_before == 0 || open_after > 0) return proposed;
  return first_open(obs, prior, true);
}

nlohmann::json HandcraftedAgent::params() const {
  return {{"safe_drop", params_.safe_drop},
          {"random_explore", params_.random_explore},
          {"sweep_stride", params_.sweep_stride},
          {"use_gps", params_.use_gps},
          {"walk_paths", params_.walk_paths}};
}

HandcraftedParams handcrafted_params_from_json(const nlohmann::json& j) {
  HandcraftedParams p;
  if (j.is_null()) return p;
  if (!j.is_object()) throw ContractError("handcrafted params must be an object");
  for (const auto& [key, value] : j.items())
    if (key != "safe_drop" && key != "random_explore" && key != "sweep_stride" && key != "use_gps" && key != "walk_paths")
      throw ContractError("unknown handcrafted param: " + key);
  p.safe_drop = j.value("safe_drop", p.safe_drop);
  p.random_explore = j.value("random_explore", p.random_explore);
  p.sweep_stride = j.value("sweep_stride", p.sweep_stride);
  p.use_gps = j.value("use_gps", p.use_gps);
  p.walk_paths = j.value("walk_paths", p.walk_paths);
  return p;
}

void HandcraftedAgent::reset(const AgentContext& ctx) {
  ctx_ = ctx;
  world_ = {ctx.cfg.dim, ctx.cfg.width, ctx.cfg.height, ctx.cfg.fixed_step ? 1 : ctx.cfg.d_max,
            obstacles_active(ctx.cfg), params_.walk_paths};
  belief_ = {ctx.initial_pose, false};
  const int stride = params_.sweep_stride > 0 ? params_.sweep_stride : ctx.cfg.half_window;
  prior_ = PriorityActionSpace::initial(ctx.cfg.dim, stride);
  prev_window_ = CellGrid();
  last_action_.reset();
  rng_ = Rng(ctx.seed);
  started_ = false;
}

Action HandcraftedAgent::act(const ObservationPacket& obs) {
  if (!started_) {
    belief_ = anchor_to_walls(belief_, obs.window, world_);
    started_ = true;
  } else if (last_action_ && is_move(*last_action_)) {
    belief_ = localize(belief_, prev_window_, obs.window, *last_action_, world_);
  }
  if (params_.use_gps && obs.pose) belief_ = {*obs.pose, true};

  const Design* design = obs.design ? obs.design.get() : ctx_.design.get();
  if (!design) throw ContractError("handcrafted agent needs a design (static context or dynamic packet)");

  auto [action, prior, exploratory] = plan(belief_, obs, *design, prior_, world_);
  if (params_.random_explore && exploratory)
    action = prior.order[uniform_below(rng_, prior.order.size())];
  prior_ = std::move(prior);
  if (params_.safe_drop) action = safe_drop_filter(obs, action, prior_, world_);

  prev_window_ = obs.window;
  last_action_ = action;
  return action;
}

}  // namespace mcon

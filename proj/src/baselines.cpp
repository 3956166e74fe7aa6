#include "mcon/baselines.hpp"

namespace mcon {

void RandomAgent::reset(const AgentContext& ctx) {
  dim_ = ctx.cfg.dim;
  rng_ = Rng(ctx.seed);
}

Action RandomAgent::act(const ObservationPacket&) {
  const auto actions = legal_actions(dim_);
  return actions[uniform_below(rng_, actions.size())];
}

void GreedyDropAgent::reset(const AgentContext& ctx) {
  ctx_ = ctx;
  world_ = {ctx.cfg.dim, ctx.cfg.width, ctx.cfg.height, 1, obstacles_active(ctx.cfg)};
  belief_ = {ctx.initial_pose, false};
  last_action_.reset();
  rng_ = Rng(ctx.seed);
  started_ = false;
}

bool GreedyDropAgent::needs_brick(const Design& design, int value, int x, int y) const {
  if (value < 0 || x < 0 || y < 0 || x >= design.width() || y >= design.height()) return false;
  const int want = design.target(y, x);
  return world_.dim == Dimensionality::D2 ? (want == 1 && value == 0) : value < want;
}

Action GreedyDropAgent::act(const ObservationPacket& obs) {
  if (started_ && last_action_ && is_move(*last_action_)) {
    const Offset d = direction_of(*last_action_);
    belief_.estimate = {std::clamp(belief_.estimate.x + d.dx, 0, world_.width - 1),
                        std::clamp(belief_.estimate.y + d.dy, 0, world_.height - 1)};
  }
  started_ = true;
  belief_ = anchor_to_walls(belief_, obs.window, world_);
  if (obs.pose) belief_ = {*obs.pose, true};

  const Design* design = obs.design ? obs.design.get() : ctx_.design.get();
  const auto [x, y] = belief_.estimate;
  Action action;
  if (design && world_.dim != Dimensionality::D3 && needs_brick(*design, obs.offset(0, 0), x, y)) {
    action = Action::Drop;
  } else {
    std::optional<Action> drop;
    if (design && world_.dim == Dimensionality::D3) {
      for (Action a : {Action::DropLeft, Action::DropRight, Action::DropFront, Action::DropRear}) {
        const Offset d = direction_of(a);
        if (needs_brick(*design, obs.offset(d.dx, d.dy), x + d.dx, y + d.dy)) {
          drop = a;
          break;
        }
      }
    }
    if (drop) {
      action = *drop;
    } else {
      const auto moves = move_actions(world_.dim);
      action = moves[uniform_below(rng_, moves.size())];
    }
  }
  last_action_ = action;
  return action;
}

std::unique_ptr<Agent> make_agent(std::string_view name, const nlohmann::json& params) {
  if (name == "handcrafted") return std::make_unique<HandcraftedAgent>(handcrafted_params_from_json(params));
  if (name == "random") return std::make_unique<RandomAgent>();
  if (name == "greedy") return std::make_unique<GreedyDropAgent>();
  throw ContractError("unknown agent: " + std::string(name));
}

}  // namespace mcon

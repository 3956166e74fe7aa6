#pragma once

#include "mcon/agent.hpp"
#include "mcon/handcrafted.hpp"

namespace mcon {

/// Uniform over the legal action set, seeded from the episode.
class RandomAgent final : public Agent {
 public:
  std::string_view name() const override { return "random"; }
  void reset(const AgentContext& ctx) override;
  Action act(const ObservationPacket& obs) override;

 private:
  Dimensionality dim_ = Dimensionality::D1;
  Rng rng_;
};

/// Drops whenever the cell under (3D: next to) the robot needs a brick, otherwise moves at
/// random. Position comes from the GPS pose when present, else from step-1 odometry with
/// wall re-anchoring.
class GreedyDropAgent final : public Agent {
 public:
  std::string_view name() const override { return "greedy"; }
  void reset(const AgentContext& ctx) override;
  Action act(const ObservationPacket& obs) override;

 private:
  bool needs_brick(const Design& design, int value, int x, int y) const;

  AgentContext ctx_;
  WorldModel world_;
  BeliefPose belief_;
  std::optional<Action> last_action_;
  Rng rng_;
  bool started_ = false;
};

}  // namespace mcon

#pragma once

#include "mcon/env.hpp"

#include <json.hpp>

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

namespace mcon {

/// What an agent learns at the start of an episode.
struct AgentContext {
  EnvConfig cfg;
  std::shared_ptr<const Design> design;  // known a priori for static tasks, null for dynamic ones
  Pose initial_pose;
  std::uint64_t seed = 0;
};

/// observe -> act contract shared by scripted agents, external learners and the human proxy.
class Agent {
 public:
  virtual ~Agent() = default;
  virtual std::string_view name() const = 0;
  virtual nlohmann::json params() const { return nlohmann::json::object(); }
  virtual void reset(const AgentContext& ctx) = 0;
  virtual Action act(const ObservationPacket& obs) = 0;
  virtual void notify(const StepOutcome&) {}
};

/// Builds "handcrafted", "random" or "greedy". Throws ContractError for unknown names.
std::unique_ptr<Agent> make_agent(std::string_view name, const nlohmann::json& params = nlohmann::json::object());

}  // namespace mcon

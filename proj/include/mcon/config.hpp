#pragma once

#include "mcon/grid.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>

namespace mcon {

/// Environment parameters. Start from `EnvConfig::defaults(dim)`; the defaults reproduce
/// the benchmark world sizes (1D: W=30, Ws=2; 2D/3D: 20x20, Ws=3).
struct EnvConfig {
  Dimensionality dim = Dimensionality::D1;
  int width = 30;
  int height = 1;
  int half_window = 2;
  Variant variant = Variant::Static;
  Density density = Density::Dense;
  int d_max = 2;
  int n_smax = 1000;
  bool obstacles = false;
  bool gps = false;
  bool fixed_step = false;
  bool landmarks = false;
  int n_landmarks = 20;
  std::uint64_t seed = 0;

  static EnvConfig defaults(Dimensionality dim);

  /// Throws ContractError on any out-of-range field.
  void validate() const;

  friend bool operator==(const EnvConfig&, const EnvConfig&) = default;
};

struct WorldShape {
  int width;
  std::optional<int> height;  // absent in 1D
};

WorldShape world_shape(const EnvConfig& cfg);

nlohmann::json to_json(const EnvConfig& cfg);
/// Missing keys keep the dimension defaults, so partial overrides are accepted.
EnvConfig env_config_from_json(const nlohmann::json& j);

}  // namespace mcon

#include "mcon/config.hpp"

namespace mcon {

EnvConfig EnvConfig::defaults(Dimensionality dim) {
  EnvConfig cfg;
  cfg.dim = dim;
  if (dim == Dimensionality::D1) {
    cfg.width = 30;
    cfg.height = 1;
    cfg.half_window = 2;
    cfg.n_smax = 1000;
  } else {
    cfg.width = 20;
    cfg.height = 20;
    cfg.half_window = 3;
    cfg.n_smax = 1500;
  }
  cfg.obstacles = dim == Dimensionality::D3;
  return cfg;
}

void EnvConfig::validate() const {
  if (width <= 0 || height <= 0) throw ContractError("world dimensions must be positive");
  if (dim == Dimensionality::D1 && height != 1) throw ContractError("1D worlds have height 1");
  if (half_window < 1) throw ContractError("half window must be at least 1");
  if (d_max < 1 || d_max > half_window) throw ContractError("d_max must lie in [1, half_window]");
  if (n_smax < 1) throw ContractError("n_smax must be at least 1");
  if (obstacles && dim == Dimensionality::D1) throw ContractError("obstacles are undefined in 1D");
  if (landmarks && n_landmarks < 0) throw ContractError("n_landmarks must be non-negative");
}

WorldShape world_shape(const EnvConfig& cfg) {
  if (cfg.width <= 0 || cfg.height <= 0) throw ContractError("world dimensions must be positive");
  if (cfg.dim == Dimensionality::D1) return {cfg.width, std::nullopt};
  return {cfg.width, cfg.height};
}

nlohmann::json to_json(const EnvConfig& cfg) {
  return {
      {"dim", std::string(to_string(cfg.dim))},
      {"W", cfg.width},
      {"H", cfg.height},
      {"Ws", cfg.half_window},
      {"variant", std::string(to_string(cfg.variant))},
      {"density", std::string(to_string(cfg.density))},
      {"d_max", cfg.d_max},
      {"N_smax", cfg.n_smax},
      {"obstacle_enabled", cfg.obstacles},
      {"gps_enabled", cfg.gps},
      {"fixed_step_enabled", cfg.fixed_step},
      {"landmarks_enabled", cfg.landmarks},
      {"n_landmarks", cfg.n_landmarks},
      {"seed", cfg.seed},
  };
}

EnvConfig env_config_from_json(const nlohmann::json& j) {
  const auto dim = dimensionality_from_string(j.at("dim").get<std::string>());
  EnvConfig cfg = EnvConfig::defaults(dim);
  cfg.width = j.value("W", cfg.width);
  cfg.height = j.value("H", cfg.height);
  cfg.half_window = j.value("Ws", cfg.half_window);
  if (j.contains("variant")) cfg.variant = variant_from_string(j.at("variant").get<std::string>());
  if (j.contains("density")) cfg.density = density_from_string(j.at("density").get<std::string>());
  cfg.d_max = j.value("d_max", cfg.d_max);
  cfg.n_smax = j.value("N_smax", cfg.n_smax);
  cfg.obstacles = j.value("obstacle_enabled", cfg.obstacles);
  cfg.gps = j.value("gps_enabled", cfg.gps);
  cfg.fixed_step = j.value("fixed_step_enabled", cfg.fixed_step);
  cfg.landmarks = j.value("landmarks_enabled", cfg.landmarks);
  cfg.n_landmarks = j.value("n_landmarks", cfg.n_landmarks);
  cfg.seed = j.value("seed", cfg.seed);
  return cfg;
}

}  // namespace mcon

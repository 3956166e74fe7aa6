#include "mcon/tasks.hpp"

#include <array>

namespace mcon {

namespace {

const std::array<TaskDescriptor, 8>& task_table() {
  static const std::array<TaskDescriptor, 8> tasks{{
      {"1d-static", Dimensionality::D1, Variant::Static, Density::Dense, Family::Gaussian1D},
      {"1d-dynamic", Dimensionality::D1, Variant::Dynamic, Density::Dense, Family::Sine1D},
      {"2d-static-dense", Dimensionality::D2, Variant::Static, Density::Dense, Family::Disk2D},
      {"2d-static-sparse", Dimensionality::D2, Variant::Static, Density::Sparse, Family::Ring2D},
      {"2d-dynamic", Dimensionality::D2, Variant::Dynamic, Density::Sparse, Family::Triangle2D},
      {"3d-static-dense", Dimensionality::D3, Variant::Static, Density::Dense, Family::Dome3D},
      {"3d-static-sparse", Dimensionality::D3, Variant::Static, Density::Sparse, Family::Shell3D},
      {"3d-dynamic", Dimensionality::D3, Variant::Dynamic, Density::Sparse, Family::Triangle3D},
  }};
  return tasks;
}

}  // namespace

EnvConfig TaskDescriptor::env_defaults() const {
  EnvConfig cfg = EnvConfig::defaults(dim);
  cfg.variant = variant;
  cfg.density = density;
  return cfg;
}

std::span<const TaskDescriptor> all_tasks() { return task_table(); }

const TaskDescriptor& find_task(std::string_view name) {
  for (const auto& t : task_table())
    if (t.name == name) return t;
  throw ContractError("unknown task: " + std::string(name));
}

}  // namespace mcon

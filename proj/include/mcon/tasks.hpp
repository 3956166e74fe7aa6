#pragma once

#include "mcon/config.hpp"
#include "mcon/designs.hpp"

#include <span>
#include <string>

namespace mcon {

/// One benchmark task: world defaults plus the design family that drives it.
struct TaskDescriptor {
  std::string name;
  Dimensionality dim;
  Variant variant;
  Density density;
  Family family;

  EnvConfig env_defaults() const;
};

/// The eight benchmark tasks: 1d-static, 1d-dynamic, 2d/3d-static-{dense,sparse}, 2d/3d-dynamic.
std::span<const TaskDescriptor> all_tasks();
const TaskDescriptor& find_task(std::string_view name);

}  // namespace mcon

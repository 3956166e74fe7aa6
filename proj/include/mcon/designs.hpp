#pragma once

#include "mcon/config.hpp"
#include "mcon/grid.hpp"
#include "mcon/rng.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace mcon {

enum class Family { Gaussian1D, Sine1D, Disk2D, Ring2D, Triangle2D, Dome3D, Shell3D, Triangle3D };

std::string_view to_string(Family family);
Family family_from_string(std::string_view text);

Dimensionality dimension_of(Family family);
Density density_of(Family family);
bool is_dynamic(Family family);

/// A family plus its named numeric parameters.
///
/// gaussian_1d: amplitude, center, sigma
/// sine_1d:     amplitude, frequency, phase, offset
/// disk_2d:     cx, cy, radius
/// ring_2d:     cx, cy, radius, thickness
/// triangle_*:  ax, ay, bx, by, cx, cy (+ height for triangle_3d)
/// dome_3d:     cx, cy, radius, levels
/// shell_3d:    cx, cy, radius, height
struct DesignSpec {
  Family family = Family::Gaussian1D;
  std::map<std::string, double> params;
  int group_id = -1;
};

/// Version of the built-in parameter tables. Bump when any table value changes.
inline constexpr int kDesignTableVersion = 1;

/// Rasterizes a spec into the configured world. Throws ContractError for a family that
/// does not match cfg.dim, a missing parameter, or an empty result.
Design generate(const DesignSpec& spec, const EnvConfig& cfg);

/// The fixed static design of a static family.
DesignSpec static_spec(Family family);

/// The 10 fixed evaluation specs of a dynamic family.
std::vector<DesignSpec> dynamic_group_specs(Family family);
std::vector<Design> dynamic_test_groups(Family family, const EnvConfig& cfg);

/// Draws a random valid design of a dynamic family (training-style variation).
Design sample_training_design(Family family, const EnvConfig& cfg, Rng& rng);

/// Every built-in parameter table as one document.
nlohmann::json design_tables_json();

/// Writes every static design, every dynamic group and manifest.json (with content hashes).
/// Returns the manifest.
nlohmann::json emit_design_suite(const std::filesystem::path& dir);

// Shape predicates used by the generators and their tests.
/// Support (target > 0) is 4-connected and every zero cell reaches the border through zeros.
bool is_dense_shape(const CellGrid& target);
/// Every support cell has a 4-neighbour outside the support (or outside the world).
bool is_sparse_shape(const CellGrid& target);

}  // namespace mcon

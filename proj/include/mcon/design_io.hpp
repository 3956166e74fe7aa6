#pragma once

#include "mcon/grid.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace mcon {

// Design document: {dim, W, H, tags: {variant, density}, group_id, target: row-major ints}.
nlohmann::json design_to_json(const Design& design);
Design design_from_json(const nlohmann::json& j);

/// Canonical single-line serialization, newline-terminated. Identical designs give identical bytes.
std::string design_to_text(const Design& design);
Design design_from_text(std::string_view text);

void write_design(const std::filesystem::path& path, const Design& design);
Design read_design(const std::filesystem::path& path);

/// "fnv1a64:<hex>" over the canonical text.
std::string design_hash(const Design& design);

nlohmann::json grid_to_json(const CellGrid& grid);
CellGrid grid_from_json(const nlohmann::json& cells, int width, int height);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace mcon

#include "mcon/design_io.hpp"

#include "mcon/hash.hpp"

#include <fstream>
#include <sstream>

namespace mcon {

nlohmann::json grid_to_json(const CellGrid& grid) {
  auto cells = nlohmann::json::array();
  for (Eigen::Index y = 0; y < grid.rows(); ++y)
    for (Eigen::Index x = 0; x < grid.cols(); ++x) cells.push_back(grid(y, x));
  return cells;
}

CellGrid grid_from_json(const nlohmann::json& cells, int width, int height) {
  if (width <= 0 || height <= 0) throw ContractError("grid dimensions must be positive");
  if (!cells.is_array() || cells.size() != static_cast<std::size_t>(width) * height)
    throw ContractError("grid array length does not match W*H");
  CellGrid grid(height, width);
  std::size_t i = 0;
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) grid(y, x) = cells.at(i++).get<int>();
  return grid;
}

nlohmann::json design_to_json(const Design& design) {
  return {
      {"dim", std::string(to_string(design.dim))},
      {"W", design.width()},
      {"H", design.height()},
      {"tags", {{"variant", std::string(to_string(design.variant))}, {"density", std::string(to_string(design.density))}}},
      {"group_id", design.group_id},
      {"target", grid_to_json(design.target)},
  };
}

Design design_from_json(const nlohmann::json& j) {
  try {
    Design d;
    d.dim = dimensionality_from_string(j.at("dim").get<std::string>());
    const int w = j.at("W").get<int>();
    const int h = j.at("H").get<int>();
    const auto& tags = j.at("tags");
    d.variant = variant_from_string(tags.at("variant").get<std::string>());
    d.density = density_from_string(tags.at("density").get<std::string>());
    d.group_id = j.at("group_id").get<int>();
    d.target = grid_from_json(j.at("target"), w, h);
    d.validate();
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw ContractError(std::string("malformed design document: ") + e.what());
  }
}

std::string design_to_text(const Design& design) { return design_to_json(design).dump() + "\n"; }

Design design_from_text(std::string_view text) {
  const auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ContractError("design document is not valid JSON");
  return design_from_json(j);
}

void write_design(const std::filesystem::path& path, const Design& design) {
  write_text_file(path, design_to_text(design));
}

Design read_design(const std::filesystem::path& path) { return design_from_text(read_text_file(path)); }

std::string design_hash(const Design& design) { return "fnv1a64:" + hex64(fnv1a64(design_to_text(design))); }

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string() + " for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace mcon

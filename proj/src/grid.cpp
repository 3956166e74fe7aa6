#include "mcon/grid.hpp"

#include <algorithm>
#include <array>

namespace mcon {

namespace {

template <typename E, std::size_t N>
E parse_enum(std::string_view text, const std::array<std::pair<std::string_view, E>, N>& table, const char* what) {
  for (const auto& [name, value] : table)
    if (name == text) return value;
  throw ContractError(std::string("unknown ") + what + ": " + std::string(text));
}

constexpr std::array<std::pair<std::string_view, Dimensionality>, 3> kDims{{
    {"1d", Dimensionality::D1},
    {"2d", Dimensionality::D2},
    {"3d", Dimensionality::D3},
}};

}  // namespace

std::string_view to_string(Dimensionality dim) {
  switch (dim) {
    case Dimensionality::D1: return "1d";
    case Dimensionality::D2: return "2d";
    case Dimensionality::D3: return "3d";
  }
  return "?";
}

Dimensionality dimensionality_from_string(std::string_view text) { return parse_enum(text, kDims, "dimensionality"); }

std::string_view to_string(Variant variant) { return variant == Variant::Static ? "static" : "dynamic"; }
std::string_view to_string(Density density) { return density == Density::Dense ? "dense" : "sparse"; }

Variant variant_from_string(std::string_view text) {
  static constexpr std::array<std::pair<std::string_view, Variant>, 2> table{{
      {"static", Variant::Static},
      {"dynamic", Variant::Dynamic},
  }};
  return parse_enum(text, table, "variant");
}

Density density_from_string(std::string_view text) {
  static constexpr std::array<std::pair<std::string_view, Density>, 2> table{{
      {"dense", Density::Dense},
      {"sparse", Density::Sparse},
  }};
  return parse_enum(text, table, "density");
}

GridState GridState::empty(Dimensionality dim, int width, int height) {
  if (width <= 0 || height <= 0) throw ContractError("grid dimensions must be positive");
  if (dim == Dimensionality::D1 && height != 1) throw ContractError("1D grids have a single row");
  GridState g;
  g.dim = dim;
  g.cells = CellGrid::Zero(height, width);
  g.landmarks = MaskGrid::Constant(height, width, false);
  return g;
}

void Design::validate() const {
  if (target.size() == 0) throw ContractError("design has no cells");
  if (dim == Dimensionality::D1 && target.rows() != 1) throw ContractError("1D design must have a single row");
  if ((target < 0).any()) throw ContractError("design target values must be non-negative");
  if (dim == Dimensionality::D2 && (target > 1).any()) throw ContractError("2D design targets must be binary");
  if (brick_count() <= 0) throw ContractError("design demands no bricks");
}

double iou(const GridState& built, const Design& design) {
  if (built.dim != design.dim) throw ContractError("iou: dimensionality mismatch");
  if (built.cells.rows() != design.target.rows() || built.cells.cols() != design.target.cols())
    throw ContractError("iou: grid and design shapes differ");
  const CellGrid effective = built.landmarks.select(CellGrid::Zero(built.height(), built.width()), built.cells);
  return iou(effective, design.target);
}

}  // namespace mcon

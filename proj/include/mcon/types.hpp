#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mcon {

/// Dense 2D array used for grids, designs and observation windows.
/// Rows are y, columns are x. 1D worlds are a single row.
template <typename Scalar>
using Grid = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using CellGrid = Grid<int>;
using MaskGrid = Grid<bool>;

enum class Dimensionality { D1, D2, D3 };

std::string_view to_string(Dimensionality dim);
Dimensionality dimensionality_from_string(std::string_view text);

/// Robot location on the grid. `y` stays 0 in 1D worlds.
struct Pose {
  int x = 0;
  int y = 0;

  friend bool operator==(const Pose&, const Pose&) = default;
};

/// Raised when an input violates a documented precondition.
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Observation sentinels.
inline constexpr int kOutsideCell = -1;
inline constexpr int kLandmarkCell = -2;

}  // namespace mcon

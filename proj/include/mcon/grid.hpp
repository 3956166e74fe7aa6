#pragma once

#include "mcon/types.hpp"

#include <memory>
#include <optional>
#include <utility>

namespace mcon {

enum class Variant { Static, Dynamic };
enum class Density { Dense, Sparse };

std::string_view to_string(Variant variant);
std::string_view to_string(Density density);
Variant variant_from_string(std::string_view text);
Density density_from_string(std::string_view text);

/// Brick content of the world plus the immutable landmark cells.
struct GridState {
  Dimensionality dim = Dimensionality::D1;
  CellGrid cells;
  MaskGrid landmarks;

  static GridState empty(Dimensionality dim, int width, int height);

  int width() const { return static_cast<int>(cells.cols()); }
  int height() const { return static_cast<int>(cells.rows()); }
  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width() && y < height(); }
  int at(Pose p) const { return cells(p.y, p.x); }
  bool landmark_at(int x, int y) const { return landmarks(y, x); }

  friend bool operator==(const GridState& a, const GridState& b) {
    return a.dim == b.dim && a.cells.rows() == b.cells.rows() && a.cells.cols() == b.cells.cols() &&
           (a.cells == b.cells).all() && (a.landmarks == b.landmarks).all();
  }
};

/// Goal grid state. Throws ContractError if the target is empty, negative, or non-binary in 2D.
struct Design {
  Dimensionality dim = Dimensionality::D1;
  CellGrid target;
  Variant variant = Variant::Static;
  Density density = Density::Dense;
  int group_id = -1;

  int width() const { return static_cast<int>(target.cols()); }
  int height() const { return static_cast<int>(target.rows()); }
  long long brick_count() const { return target.cast<long long>().sum(); }
  void validate() const;

  friend bool operator==(const Design& a, const Design& b) {
    return a.dim == b.dim && a.variant == b.variant && a.density == b.density && a.group_id == b.group_id &&
           a.target.rows() == b.target.rows() && a.target.cols() == b.target.cols() &&
           (a.target == b.target).all();
  }
};

/// What the agent receives after every reset and step.
struct ObservationPacket {
  CellGrid window;
  int n_steps = 0;
  int n_bricks = 0;
  std::shared_ptr<const Design> design;  // dynamic tasks only
  std::optional<Pose> pose;              // GPS ablation only

  int half_window() const { return static_cast<int>(window.cols() / 2); }
  int center() const { return half_window(); }
  /// Window value at offset (dx, dy) from the robot.
  int offset(int dx, int dy) const {
    const int row = window.rows() == 1 ? 0 : center() + dy;
    return window(row, center() + dx);
  }
};

/// Copies the (2*half+1)-wide window centred on `center`, padding with kOutsideCell and
/// marking landmark cells with kLandmarkCell. A single-row source yields a single-row window.
template <typename Derived>
CellGrid extract_window(const Eigen::ArrayBase<Derived>& cells, const MaskGrid& landmarks, Pose center, int half) {
  const int rows = static_cast<int>(cells.rows());
  const int cols = static_cast<int>(cells.cols());
  const int side = 2 * half + 1;
  const int win_rows = rows == 1 ? 1 : side;
  const int origin_x = center.x - half;
  const int origin_y = rows == 1 ? 0 : center.y - half;

  CellGrid window = CellGrid::Constant(win_rows, side, kOutsideCell);
  const int x0 = std::max(origin_x, 0);
  const int x1 = std::min(origin_x + side, cols);
  const int y0 = std::max(origin_y, 0);
  const int y1 = std::min(origin_y + win_rows, rows);
  if (x1 <= x0 || y1 <= y0) return window;

  auto dst = window.block(y0 - origin_y, x0 - origin_x, y1 - y0, x1 - x0);
  dst = landmarks.block(y0, x0, y1 - y0, x1 - x0)
            .select(CellGrid::Constant(y1 - y0, x1 - x0, kLandmarkCell),
                    cells.derived().block(y0, x0, y1 - y0, x1 - x0).template cast<int>());
  return window;
}

/// Ratio-of-sums overlap score: sum(min) / sum(max). Returns 0 when nothing overlaps.
template <typename A, typename B>
double iou(const Eigen::ArrayBase<A>& built, const Eigen::ArrayBase<B>& target) {
  if (built.rows() != target.rows() || built.cols() != target.cols())
    throw ContractError("iou: grid and design shapes differ");
  const auto b = built.derived().template cast<long long>();
  const auto t = target.derived().template cast<long long>();
  const long long inter = b.min(t).sum();
  if (inter == 0) return 0.0;
  const long long uni = b.max(t).sum();
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double iou(const GridState& built, const Design& design);

}  // namespace mcon

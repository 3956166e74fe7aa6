#pragma once

// Independent reference implementations used as test oracles. Kept deliberately naive:
// loops over explicit coordinates, no Eigen block arithmetic.

#include "mcon/env.hpp"
#include "mcon/grid.hpp"

#include <set>
#include <utility>
#include <vector>

namespace oracle {

// Enlarge the grid by `half` on every side, pre-fill with -1, paint the world in, slice.
inline mcon::CellGrid padded_window(const mcon::CellGrid& cells, const mcon::MaskGrid& landmarks, mcon::Pose c,
                                    int half) {
  const int H = static_cast<int>(cells.rows()), W = static_cast<int>(cells.cols());
  const int padY = H == 1 ? 0 : half;
  std::vector<std::vector<int>> big(H + 2 * padY, std::vector<int>(W + 2 * half, -1));
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x) big[y + padY][x + half] = landmarks(y, x) ? -2 : cells(y, x);
  const int side = 2 * half + 1, rows = H == 1 ? 1 : side;
  mcon::CellGrid out(rows, side);
  for (int r = 0; r < rows; ++r)
    for (int k = 0; k < side; ++k) out(r, k) = big[(H == 1 ? 0 : c.y) + r][c.x + k];
  return out;
}

inline double iou_by_sets(const mcon::CellGrid& a, const mcon::CellGrid& b) {
  std::set<std::pair<int, int>> sa, sb, inter, uni;
  for (int y = 0; y < a.rows(); ++y)
    for (int x = 0; x < a.cols(); ++x) {
      if (a(y, x)) sa.insert({y, x});
      if (b(y, x)) sb.insert({y, x});
    }
  for (const auto& p : sa) {
    uni.insert(p);
    if (sb.count(p)) inter.insert(p);
  }
  for (const auto& p : sb) uni.insert(p);
  if (inter.empty()) return 0.0;
  return static_cast<double>(inter.size()) / static_cast<double>(uni.size());
}

inline double iou_by_sums(const mcon::CellGrid& a, const mcon::CellGrid& b) {
  long long num = 0, den = 0;
  for (int y = 0; y < a.rows(); ++y)
    for (int x = 0; x < a.cols(); ++x) {
      num += a(y, x) < b(y, x) ? a(y, x) : b(y, x);
      den += a(y, x) > b(y, x) ? a(y, x) : b(y, x);
    }
  return num == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

// d unit steps, stopping at the wall and (with obstacles) before bricks or landmarks.
inline mcon::Pose walk(const mcon::GridState& g, mcon::Pose p, int dx, int dy, int d, bool obstacles) {
  for (int i = 0; i < d; ++i) {
    const int nx = p.x + dx, ny = p.y + dy;
    if (nx < 0 || ny < 0 || nx >= g.width() || ny >= g.height()) break;
    if (obstacles && (g.cells(ny, nx) > 0 || g.landmarks(ny, nx))) break;
    p = {nx, ny};
  }
  return p;
}

// Feasible shifts: k such that next(r, c) == prev(r + k*dy, c + k*dx) wherever both exist.
inline std::vector<int> feasible_shifts(const mcon::CellGrid& prev, const mcon::CellGrid& next, int dx, int dy,
                                        int d_max) {
  std::vector<int> out;
  for (int k = 1; k <= d_max; ++k) {
    bool ok = true;
    for (int r = 0; r < next.rows() && ok; ++r)
      for (int c = 0; c < next.cols() && ok; ++c) {
        const int pr = r + k * dy, pc = c + k * dx;
        if (pr < 0 || pc < 0 || pr >= prev.rows() || pc >= prev.cols()) continue;
        if (prev(pr, pc) != next(r, c)) ok = false;
      }
    if (ok) out.push_back(k);
  }
  return out;
}

}  // namespace oracle

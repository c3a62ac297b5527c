#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "dmpm/core/errors.hpp"
#include "dmpm/core/linalg.hpp"

namespace dmpm {

/// Uniform background grid. Node (i, j) sits at origin + h * (i, j) and has
/// flat index i + nx * j.
struct GridSpec {
  Vec2d origin = Vec2d::Zero();
  double h = 0.0;
  int nx = 0;
  int ny = 0;

  int num_nodes() const { return nx * ny; }
  int index(int i, int j) const { return i + nx * j; }
  Vec2d node_position(int i, int j) const {
    return Vec2d(origin.x + h * i, origin.y + h * j);
  }
  Vec2d upper() const { return node_position(nx - 1, ny - 1); }

  void validate() const {
    if (!(h > 0.0)) throw ConfigError("grid spacing h must be positive");
    if (nx < 4 || ny < 4) throw ConfigError("grid needs at least 4 nodes per axis");
  }

  /// Smallest grid with spacing h whose interior (margin_cells away from
  /// the boundary) covers the box [lo, hi].
  static GridSpec Covering(const Vec2d& lo, const Vec2d& hi, double h, int margin_cells) {
    GridSpec g;
    g.h = h;
    g.origin = Vec2d(lo.x - margin_cells * h, lo.y - margin_cells * h);
    g.nx = static_cast<int>(std::ceil((hi.x - lo.x) / h)) + 2 * margin_cells + 1;
    g.ny = static_cast<int>(std::ceil((hi.y - lo.y) / h)) + 2 * margin_cells + 1;
    g.validate();
    return g;
  }
};

/// Node range touched by the current particle stencils, inclusive.
struct NodeBox {
  int i0 = 0, i1 = -1;
  int j0 = 0, j1 = -1;

  bool empty() const { return i1 < i0 || j1 < j0; }
};

/// Transient per-node storage. Everything is cleared at the start of each
/// evaluation; only nodes inside the active box are touched.
template <typename T>
struct GridScratch {
  std::vector<T> mass;
  std::vector<Vec2<T>> momentum;
  std::vector<Vec2<T>> velocity;
  std::vector<Vec2<T>> force;
  std::vector<Vec2<T>> acceleration;
  NodeBox active;

  void resize(const GridSpec& grid) {
    const auto n = static_cast<std::size_t>(grid.num_nodes());
    if (mass.size() == n && nx_ == grid.nx) return;
    nx_ = grid.nx;
    mass.assign(n, T(0.0));
    momentum.assign(n, Vec2<T>::Zero());
    velocity.assign(n, Vec2<T>::Zero());
    force.assign(n, Vec2<T>::Zero());
    acceleration.assign(n, Vec2<T>::Zero());
    active = NodeBox{};
  }

  /// Zeroes the previously active box and adopts a new one. Nodes outside
  /// the active box are always zero.
  void reset(const GridSpec& grid, const NodeBox& next) {
    resize(grid);
    clear_box(grid, active);
    active = next;
  }

 private:
  int nx_ = 0;

  void clear_box(const GridSpec& grid, const NodeBox& box) {
    if (box.empty()) return;
    for (int j = box.j0; j <= box.j1; ++j) {
      const int row = grid.index(box.i0, j);
      const int len = box.i1 - box.i0 + 1;
      std::fill_n(mass.begin() + row, len, T(0.0));
      std::fill_n(momentum.begin() + row, len, Vec2<T>::Zero());
      std::fill_n(velocity.begin() + row, len, Vec2<T>::Zero());
      std::fill_n(force.begin() + row, len, Vec2<T>::Zero());
      std::fill_n(acceleration.begin() + row, len, Vec2<T>::Zero());
    }
  }
};

/// Nodes with mass at or below this carry no velocity or acceleration (kg).
inline constexpr double kMassCutoff = 1e-10;

}  // namespace dmpm

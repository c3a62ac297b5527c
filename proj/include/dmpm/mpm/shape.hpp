// Quadratic B-spline interpolation over the 3x3 node stencil nearest to a
// particle.
#pragma once

#include <array>
#include <cmath>
#include <sstream>

#include "dmpm/core/dual.hpp"
#include "dmpm/core/errors.hpp"
#include "dmpm/core/linalg.hpp"
#include "dmpm/mpm/grid.hpp"

namespace dmpm {

/// 1D quadratic B-spline N(r), r in cell units. Reference form used by tests.
inline double bspline_quadratic(double r) {
  const double a = std::abs(r);
  if (a < 0.5) return 0.75 - a * a;
  if (a < 1.5) return 0.5 * (1.5 - a) * (1.5 - a);
  return 0.0;
}

template <typename T>
struct ShapeWeights {
  /// Lower-left node of the stencil.
  int base_i = 0;
  int base_j = 0;
  /// w[a + 3 * b] belongs to node (base_i + a, base_j + b).
  std::array<T, 9> w;
  std::array<Vec2<T>, 9> grad;

  int node(const GridSpec& grid, int k) const {
    return grid.index(base_i + k % 3, base_j + k / 3);
  }

  /// Flat index of the stencil's lower-left node; node (a, b) of the
  /// stencil is first_node + a + b * grid.nx.
  int first_node(const GridSpec& grid) const { return grid.index(base_i, base_j); }
};

namespace detail {

// Per-axis weights and d/dxi for fractional offset fx in [0.5, 1.5).
template <typename T>
inline void axis_weights(const T& fx, std::array<T, 3>& w, std::array<T, 3>& dw) {
  const T a = 1.5 - fx;
  const T b = fx - 1.0;
  const T c = fx - 0.5;
  w[0] = 0.5 * (a * a);
  w[1] = 0.75 - b * b;
  w[2] = 0.5 * (c * c);
  dw[0] = -a;
  dw[1] = -2.0 * b;
  dw[2] = c;
}

}  // namespace detail

/// Minimum distance, in cells, between a particle and the grid boundary.
inline constexpr double kBoundaryMarginCells = 2.0;

template <typename T>
ShapeWeights<T> shape_weights(const Vec2<T>& xp, const GridSpec& grid) {
  const double inv_h = 1.0 / grid.h;
  const T xi = (xp.x - grid.origin.x) * inv_h;
  const T eta = (xp.y - grid.origin.y) * inv_h;
  const double xi_v = value(xi);
  const double eta_v = value(eta);
  const double hi_x = grid.nx - 1 - kBoundaryMarginCells;
  const double hi_y = grid.ny - 1 - kBoundaryMarginCells;
  if (!(xi_v >= kBoundaryMarginCells && xi_v <= hi_x && eta_v >= kBoundaryMarginCells &&
        eta_v <= hi_y)) {
    std::ostringstream msg;
    msg << "particle at (" << value(xp.x) << ", " << value(xp.y)
        << ") is within " << kBoundaryMarginCells << " cells of the grid boundary";
    throw SimulationError(SimulationError::Kind::kBoundaryViolation, msg.str());
  }

  ShapeWeights<T> sw;
  sw.base_i = static_cast<int>(std::floor(xi_v - 0.5));
  sw.base_j = static_cast<int>(std::floor(eta_v - 0.5));
  std::array<T, 3> wx, wy, dwx, dwy;
  detail::axis_weights<T>(xi - double(sw.base_i), wx, dwx);
  detail::axis_weights<T>(eta - double(sw.base_j), wy, dwy);
  for (int b = 0; b < 3; ++b) {
    for (int a = 0; a < 3; ++a) {
      const int k = a + 3 * b;
      sw.w[k] = wx[a] * wy[b];
      sw.grad[k] = Vec2<T>((dwx[a] * wy[b]) * inv_h, (wx[a] * dwy[b]) * inv_h);
    }
  }
  return sw;
}

}  // namespace dmpm

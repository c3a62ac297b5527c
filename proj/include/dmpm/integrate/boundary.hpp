// Grid-level Dirichlet constraints and zero-order-hold control schedules.
#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dmpm/core/dual.hpp"
#include "dmpm/core/errors.hpp"
#include "dmpm/mpm/grid.hpp"

namespace dmpm {

enum class AxisMode { kFree, kFixed, kPrescribed };

struct AxisConstraint {
  AxisMode mode = AxisMode::kFree;
  /// For kPrescribed: control channel index, or -1 to use `constant`.
  int channel = -1;
  double constant = 0.0;

  static AxisConstraint Free() { return {}; }
  static AxisConstraint Fixed() { return {AxisMode::kFixed, -1, 0.0}; }
  static AxisConstraint Channel(int c) { return {AxisMode::kPrescribed, c, 0.0}; }
  static AxisConstraint Constant(double v) { return {AxisMode::kPrescribed, -1, v}; }
};

struct BoundaryRegion {
  std::string name;
  std::vector<int> nodes;
  std::array<AxisConstraint, 2> axes;
};

/// Selects nodes (i, j) of `grid` for which pred(i, j, position) holds.
inline std::vector<int> select_nodes(
    const GridSpec& grid, const std::function<bool(int, int, const Vec2d&)>& pred) {
  std::vector<int> nodes;
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      if (pred(i, j, grid.node_position(i, j))) nodes.push_back(grid.index(i, j));
    }
  }
  return nodes;
}

struct BoundaryConditionSet {
  std::vector<BoundaryRegion> regions;

  bool empty() const { return regions.empty(); }

  /// Largest referenced channel + 1.
  int channels_required() const {
    int n = 0;
    for (const auto& r : regions)
      for (const auto& a : r.axes)
        if (a.mode == AxisMode::kPrescribed && a.channel >= 0) n = std::max(n, a.channel + 1);
    return n;
  }

  /// Checks node indices and that no node axis is constrained twice.
  void validate(const GridSpec& grid) const {
    std::vector<std::array<bool, 2>> seen(static_cast<std::size_t>(grid.num_nodes()),
                                          {false, false});
    for (const auto& r : regions) {
      for (int n : r.nodes) {
        if (n < 0 || n >= grid.num_nodes())
          throw ConfigError("boundary region '" + r.name + "' references a node outside the grid");
        for (int a = 0; a < 2; ++a) {
          if (r.axes[a].mode == AxisMode::kFree) continue;
          if (seen[n][a])
            throw ConfigError("node axis constrained by more than one region ('" + r.name + "')");
          seen[n][a] = true;
        }
      }
    }
  }
};

namespace detail {

template <typename T>
T prescribed_value(const AxisConstraint& c, std::span<const T> controls) {
  if (c.channel < 0) return T(c.constant);
  if (static_cast<std::size_t>(c.channel) >= controls.size())
    throw ConfigError("boundary condition references missing control channel " +
                      std::to_string(c.channel));
  return controls[static_cast<std::size_t>(c.channel)];
}

}  // namespace detail

/// Overrides constrained node velocities: fixed axes to 0, prescribed axes
/// to the control value. Only nodes carrying mass are touched.
template <typename T>
void apply_velocity_bc(GridScratch<T>& g, const BoundaryConditionSet& bc,
                       std::span<const T> controls) {
  for (const auto& r : bc.regions) {
    for (int a = 0; a < 2; ++a) {
      const AxisConstraint& c = r.axes[a];
      if (c.mode == AxisMode::kFree) continue;
      const T target = c.mode == AxisMode::kFixed ? T(0.0) : detail::prescribed_value(c, controls);
      for (int n : r.nodes) {
        if (!(value(g.mass[n]) > kMassCutoff)) continue;
        g.velocity[n][a] = target;
      }
    }
  }
}

/// Constrained axes carry no acceleration (ZOH control is piecewise constant).
template <typename T>
void apply_acceleration_bc(GridScratch<T>& g, const BoundaryConditionSet& bc) {
  for (const auto& r : bc.regions) {
    for (int a = 0; a < 2; ++a) {
      if (r.axes[a].mode == AxisMode::kFree) continue;
      for (int n : r.nodes) g.acceleration[n][a] = T(0.0);
    }
  }
}

template <typename T>
void apply_grid_bc(GridScratch<T>& g, const BoundaryConditionSet& bc,
                   std::span<const T> controls) {
  apply_velocity_bc(g, bc, controls);
  apply_acceleration_bc(g, bc);
}

/// Zero-order-hold schedule: values[k] applies on [t_start + k hold, t_start + (k+1) hold).
struct ControlSequence {
  std::vector<double> values;
  double hold = 0.05;
  double t_start = 0.0;
  int channel = 0;

  /// Index of the hold interval containing t; clamped to [0, size-1].
  std::size_t index_at(double t) const {
    if (values.empty()) throw ConfigError("empty control sequence");
    // Relative slack so that t = t_start + k * hold assembled from steps of
    // hold / n lands in interval k.
    const double pos = (t - t_start) / hold + 1e-9;
    if (pos <= 0.0) return 0;
    const auto k = static_cast<std::size_t>(std::floor(pos));
    return std::min(k, values.size() - 1);
  }

  double at(double t) const { return values[index_at(t)]; }

  double t_end() const { return t_start + hold * static_cast<double>(values.size()); }

  static ControlSequence Concatenate(const ControlSequence& a, const ControlSequence& b) {
    ControlSequence out = a;
    out.values.insert(out.values.end(), b.values.begin(), b.values.end());
    return out;
  }
};

}  // namespace dmpm

// Derivative-form MPM: the particle state S = (x, v, F) evolves as the ODE
// dS/dt = f(S, u), evaluated by a single P2G / G2P2G / G2P pass.
#pragma once

#include <cmath>
#include <span>
#include <sstream>
#include <vector>

#include "dmpm/integrate/boundary.hpp"
#include "dmpm/materials/svk.hpp"
#include "dmpm/mpm/transfer.hpp"

namespace dmpm {

/// Everything except the particle state that the dynamics depend on.
struct Model {
  GridSpec grid;
  MaterialParams material;
  BoundaryConditionSet bc;
  Vec2d gravity = Vec2d::Zero();
  /// Linear velocity drag (1/s), applied as the body force -drag * v_p.
  /// Zero for physical runs; used only to settle initial states.
  double drag = 0.0;
};

/// Reusable buffers for one derivative evaluation.
template <typename T>
struct Workspace {
  GridScratch<T> grid;
  std::vector<ShapeWeights<T>> weights;
  std::vector<Mat2<T>> stress;
  std::vector<Vec2<T>> body;
};

namespace detail {

template <typename T>
void check_finite(const StateDerivative<T>& d) {
  for (std::size_t p = 0; p < d.size(); ++p) {
    const double s = value(d.xdot[p].x) + value(d.xdot[p].y) + value(d.vdot[p].x) +
                     value(d.vdot[p].y) + value(d.Fdot[p].xx) + value(d.Fdot[p].xy) +
                     value(d.Fdot[p].yx) + value(d.Fdot[p].yy);
    if (!std::isfinite(s)) {
      std::ostringstream msg;
      msg << "non-finite state derivative at particle " << p;
      throw SimulationError(SimulationError::Kind::kNonFinite, msg.str());
    }
  }
}

}  // namespace detail

/// Evaluates dS/dt for the given controls. Deterministic: identical inputs
/// give bit-identical outputs.
template <typename T>
DMPM_FLATTEN void derivative_eval(const ParticleSet<T>& state, const Model& model,
                     std::span<const T> controls, Workspace<T>& ws, StateDerivative<T>& out) {
  const GridSpec& grid = model.grid;
  const std::size_t n = state.size();
  out.resize(n);

  // P2G
  ws.grid.reset(grid, compute_weights(state.x, grid, ws.weights));
  p2g(state, ws.weights, grid, ws.grid);
  apply_velocity_bc(ws.grid, model.bc, controls);

  // G2P2G: kinematics from the constrained grid velocities, then stresses
  // and nodal forces.
  particle_kinematics(ws.grid, state, ws.weights, grid, out.xdot, out.Fdot);
  ws.stress.resize(n);
  ws.body.resize(n);
  const Vec2<T> g(T(model.gravity.x), T(model.gravity.y));
  for (std::size_t p = 0; p < n; ++p) {
    ws.stress[p] = total_stress(state.F[p], out.Fdot[p], model.material);
    ws.body[p] = g;
    if (model.drag != 0.0) ws.body[p] -= model.drag * state.v[p];
  }
  internal_forces(state, std::span<const Mat2<T>>(ws.stress), std::span<const Vec2<T>>(ws.body),
                  ws.weights, grid, ws.grid);

  // Grid accelerations, constrained.
  grid_accelerations(grid, ws.grid);
  apply_acceleration_bc(ws.grid, model.bc);

  // G2P
  g2p(ws.grid.acceleration, ws.weights, grid, out.vdot);
  detail::check_finite(out);
}

template <typename T>
StateDerivative<T> derivative_eval(const ParticleSet<T>& state, const Model& model,
                                   std::span<const T> controls) {
  Workspace<T> ws;
  StateDerivative<T> out;
  derivative_eval(state, model, controls, ws, out);
  return out;
}

}  // namespace dmpm

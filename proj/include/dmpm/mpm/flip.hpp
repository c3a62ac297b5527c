// Standard FLIP update-stress-last MPM step, kept as the dissipation baseline.
#pragma once

#include <span>
#include <vector>

#include "dmpm/mpm/derivative.hpp"

namespace dmpm {

template <typename T>
struct FlipWorkspace {
  Workspace<T> base;
  std::vector<Vec2<T>> old_velocity;
  std::vector<Vec2<T>> dv;
};

/// One FLIP USL step (pure FLIP, no PIC blending):
///   P2G of mass and momentum, nodal forces from the current stresses,
///   mv_I += f_I dt with constraints, then
///   v_p += sum w (v_I^new - v_I^old), x_p += dt sum w v_I^new,
///   F_p = (I + dt L^new) F_p.
template <typename T>
void flip_usl_step(ParticleSet<T>& s, const Model& model, std::span<const T> controls, double dt,
                   FlipWorkspace<T>& ws) {
  const GridSpec& grid = model.grid;
  const std::size_t n = s.size();
  Workspace<T>& w = ws.base;
  GridScratch<T>& g = w.grid;

  g.reset(grid, compute_weights(s.x, grid, w.weights));
  p2g(s, w.weights, grid, g);

  // Stress of the current configuration. It depends only on F and, for the
  // dissipative part, the current rate L F seen on the grid.
  apply_velocity_bc(g, model.bc, controls);
  w.stress.resize(n);
  w.body.resize(n);
  const Vec2<T> grav(T(model.gravity.x), T(model.gravity.y));
  for (std::size_t p = 0; p < n; ++p) {
    const Mat2<T> Fdot = velocity_gradient(w.weights[p], grid, g.velocity) * s.F[p];
    w.stress[p] = total_stress(s.F[p], Fdot, model.material);
    w.body[p] = grav;
    if (model.drag != 0.0) w.body[p] -= model.drag * s.v[p];
  }
  internal_forces(s, std::span<const Mat2<T>>(w.stress), std::span<const Vec2<T>>(w.body),
                  w.weights, grid, g);

  // Grid momentum update. old_velocity keeps the unconstrained P2G velocity.
  // Only nodes inside the active box are ever read back.
  ws.old_velocity.resize(g.velocity.size());
  ws.dv.resize(g.velocity.size());
  const NodeBox& b = g.active;
  for (int j = b.j0; j <= b.j1; ++j) {
    for (int i = b.i0; i <= b.i1; ++i) {
      const int node = grid.index(i, j);
      if (!(value(g.mass[node]) > kMassCutoff)) {
        ws.old_velocity[node] = Vec2<T>::Zero();
        continue;
      }
      ws.old_velocity[node] = g.momentum[node] / g.mass[node];
      g.momentum[node] += dt * g.force[node];
      g.velocity[node] = g.momentum[node] / g.mass[node];
    }
  }
  apply_velocity_bc(g, model.bc, controls);

  // G2P
  for (int j = b.j0; j <= b.j1; ++j) {
    for (int i = b.i0; i <= b.i1; ++i) {
      const int node = grid.index(i, j);
      ws.dv[node] = g.velocity[node] - ws.old_velocity[node];
    }
  }
  for (std::size_t p = 0; p < n; ++p) {
    const ShapeWeights<T>& sw = w.weights[p];
    Vec2<T> dv = Vec2<T>::Zero();
    Vec2<T> vnew = Vec2<T>::Zero();
    Mat2<T> L = Mat2<T>::Zero();
    for (int k = 0; k < 9; ++k) {
      const int node = sw.node(grid, k);
      dv += sw.w[k] * ws.dv[node];
      vnew += sw.w[k] * g.velocity[node];
      L += outer(g.velocity[node], sw.grad[k]);
    }
    s.v[p] += dv;
    s.x[p] += dt * vnew;
    Mat2<T> step = Mat2<T>::Identity();
    step += dt * L;
    s.F[p] = step * s.F[p];
  }
}

template <typename T>
ParticleSet<T> flip_usl_step(ParticleSet<T> s, const Model& model, std::span<const T> controls,
                             double dt) {
  FlipWorkspace<T> ws;
  flip_usl_step(s, model, controls, dt, ws);
  return s;
}

}  // namespace dmpm

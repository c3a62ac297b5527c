// Particle <-> grid transfers. All scatter loops run over particles in index
// order, so the accumulated grid values are reproducible bit for bit.
#pragma once

#include <algorithm>
#include <limits>
#include <span>
#include <vector>

#include "dmpm/core/attributes.hpp"
#include "dmpm/materials/svk.hpp"
#include "dmpm/mpm/grid.hpp"
#include "dmpm/mpm/particles.hpp"
#include "dmpm/mpm/shape.hpp"

namespace dmpm {

/// Shape weights for every particle plus the node box they cover.
template <typename T>
DMPM_FLATTEN NodeBox compute_weights(const std::vector<Vec2<T>>& x, const GridSpec& grid,
                        std::vector<ShapeWeights<T>>& out) {
  out.resize(x.size());
  NodeBox box{std::numeric_limits<int>::max(), std::numeric_limits<int>::min(),
              std::numeric_limits<int>::max(), std::numeric_limits<int>::min()};
  for (std::size_t p = 0; p < x.size(); ++p) {
    out[p] = shape_weights(x[p], grid);
    box.i0 = std::min(box.i0, out[p].base_i);
    box.i1 = std::max(box.i1, out[p].base_i + 2);
    box.j0 = std::min(box.j0, out[p].base_j);
    box.j1 = std::max(box.j1, out[p].base_j + 2);
  }
  if (x.empty()) return NodeBox{};
  return box;
}

/// Mass and momentum scatter; velocity = momentum / mass above the cutoff.
template <typename T>
DMPM_FLATTEN void p2g(const ParticleSet<T>& particles, const std::vector<ShapeWeights<T>>& weights,
         const GridSpec& grid, GridScratch<T>& g) {
  for (std::size_t p = 0; p < particles.size(); ++p) {
    const ShapeWeights<T>& sw = weights[p];
    const double m = particles.mass[p];
    const Vec2<T> mv = m * particles.v[p];
    const int n0 = sw.first_node(grid);
    for (int b = 0, k = 0; b < 3; ++b) {
      for (int a = 0; a < 3; ++a, ++k) {
        const int n = n0 + a + b * grid.nx;
        g.mass[n] += m * sw.w[k];
        g.momentum[n] += sw.w[k] * mv;
      }
    }
  }
  const NodeBox& b = g.active;
  if (b.empty()) return;
  for (int j = b.j0; j <= b.j1; ++j) {
    for (int i = b.i0; i <= b.i1; ++i) {
      const int n = grid.index(i, j);
      if (value(g.mass[n]) > kMassCutoff) {
        g.velocity[n] = g.momentum[n] / g.mass[n];
      } else {
        g.velocity[n] = Vec2<T>::Zero();
      }
    }
  }
}

/// Convenience overload computing weights internally.
template <typename T>
GridScratch<T> p2g(const ParticleSet<T>& particles, const GridSpec& grid) {
  std::vector<ShapeWeights<T>> weights;
  GridScratch<T> g;
  g.resize(grid);
  g.reset(grid, compute_weights(particles.x, grid, weights));
  p2g(particles, weights, grid, g);
  return g;
}

/// Velocity gradient L = sum_I v_I (grad w_Ip)^T.
template <typename T>
Mat2<T> velocity_gradient(const ShapeWeights<T>& sw, const GridSpec& grid,
                          const std::vector<Vec2<T>>& node_velocity) {
  Mat2<T> L = Mat2<T>::Zero();
  const int n0 = sw.first_node(grid);
  for (int b = 0, k = 0; b < 3; ++b)
    for (int a = 0; a < 3; ++a, ++k) L += outer(node_velocity[n0 + a + b * grid.nx], sw.grad[k]);
  return L;
}

/// xdot = sum_I w v_I and Fdot = L F from the (constrained) grid velocities.
template <typename T>
DMPM_FLATTEN void particle_kinematics(const GridScratch<T>& g, const ParticleSet<T>& particles,
                         const std::vector<ShapeWeights<T>>& weights, const GridSpec& grid,
                         std::vector<Vec2<T>>& xdot, std::vector<Mat2<T>>& Fdot) {
  xdot.resize(particles.size());
  Fdot.resize(particles.size());
  for (std::size_t p = 0; p < particles.size(); ++p) {
    const ShapeWeights<T>& sw = weights[p];
    Vec2<T> vel = Vec2<T>::Zero();
    Mat2<T> L = Mat2<T>::Zero();
    const int n0 = sw.first_node(grid);
    for (int b = 0, k = 0; b < 3; ++b) {
      for (int a = 0; a < 3; ++a, ++k) {
        const Vec2<T>& vi = g.velocity[n0 + a + b * grid.nx];
        vel += sw.w[k] * vi;
        L += outer(vi, sw.grad[k]);
      }
    }
    xdot[p] = vel;
    Fdot[p] = L * particles.F[p];
  }
}

/// f_I = -sum_p V_p sigma_p grad w_Ip + sum_p w_Ip m_p b_p, with current
/// volume V_p = det(F_p) V0_p. Body forces are accelerations (m/s^2).
template <typename T>
DMPM_FLATTEN void internal_forces(const ParticleSet<T>& particles, std::span<const Mat2<T>> stress,
                     std::span<const Vec2<T>> body_accel,
                     const std::vector<ShapeWeights<T>>& weights, const GridSpec& grid,
                     GridScratch<T>& g) {
  for (std::size_t p = 0; p < particles.size(); ++p) {
    const Mat2<T>& F = particles.F[p];
    check_not_inverted(F);
    const T vol = F.determinant() * particles.volume0[p];
    const Mat2<T> vs = vol * stress[p];
    const Vec2<T> mb = particles.mass[p] * body_accel[p];
    const ShapeWeights<T>& sw = weights[p];
    const int n0 = sw.first_node(grid);
    for (int b = 0, k = 0; b < 3; ++b) {
      for (int a = 0; a < 3; ++a, ++k) {
        g.force[n0 + a + b * grid.nx] += sw.w[k] * mb - vs * sw.grad[k];
      }
    }
  }
}

/// a_I = f_I / m_I above the mass cutoff, zero elsewhere.
template <typename T>
void grid_accelerations(const GridSpec& grid, GridScratch<T>& g) {
  const NodeBox& b = g.active;
  if (b.empty()) return;
  for (int j = b.j0; j <= b.j1; ++j) {
    for (int i = b.i0; i <= b.i1; ++i) {
      const int n = grid.index(i, j);
      if (value(g.mass[n]) > kMassCutoff) {
        g.acceleration[n] = g.force[n] / g.mass[n];
      } else {
        g.acceleration[n] = Vec2<T>::Zero();
      }
    }
  }
}

/// Interpolates a node field back to the particles.
template <typename T>
DMPM_FLATTEN void g2p(const std::vector<Vec2<T>>& node_field, const std::vector<ShapeWeights<T>>& weights,
         const GridSpec& grid, std::vector<Vec2<T>>& out) {
  out.resize(weights.size());
  for (std::size_t p = 0; p < weights.size(); ++p) {
    const ShapeWeights<T>& sw = weights[p];
    Vec2<T> acc = Vec2<T>::Zero();
    const int n0 = sw.first_node(grid);
    for (int b = 0, k = 0; b < 3; ++b)
      for (int a = 0; a < 3; ++a, ++k) acc += sw.w[k] * node_field[n0 + a + b * grid.nx];
    out[p] = acc;
  }
}

}  // namespace dmpm

// Shared fixtures for the unit tests.
#pragma once

#include <random>

#include "dmpm/dmpm.hpp"

namespace dmpm::test {

/// 24 x 24 grid, h = 0.1, origin at 0. Interior for particles: [0.25, 2.05].
inline GridSpec small_grid(double h = 0.1, int n = 24) {
  GridSpec g;
  g.origin = Vec2d::Zero();
  g.h = h;
  g.nx = n;
  g.ny = n;
  return g;
}

inline MaterialParams rubber(double lambda_d = 0.0, double mu_d = 0.0) {
  return MaterialParams::FromYoungPoisson(1.5e6, 0.47, 1100.0, lambda_d, mu_d);
}

inline Model free_model(const GridSpec& g, const MaterialParams& mat,
                        Vec2d gravity = Vec2d::Zero()) {
  Model m;
  m.grid = g;
  m.material = mat;
  m.gravity = gravity;
  return m;
}

/// n particles uniformly placed in [lo, hi]^2, random velocities, F near I.
inline ParticleSet<double> random_particles(std::mt19937_64& rng, int n, double lo, double hi,
                                            double vscale = 1.0, double fscale = 0.05) {
  std::uniform_real_distribution<double> pos(lo, hi), u(-1.0, 1.0), m(0.5, 2.0);
  ParticleSet<double> s;
  for (int p = 0; p < n; ++p) {
    s.add(Vec2d(pos(rng), pos(rng)), Vec2d(vscale * u(rng), vscale * u(rng)), m(rng), 1e-3 * m(rng));
    s.F.back() = Mat2d(1.0 + fscale * u(rng), fscale * u(rng), fscale * u(rng),
                       1.0 + fscale * u(rng));
  }
  return s;
}

inline double fnorm(const Mat2d& m) { return std::sqrt(ddot(m, m)); }

inline double max_abs_diff(const std::vector<Vec2d>& a, const std::vector<Vec2d>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max({m, std::abs(a[i].x - b[i].x), std::abs(a[i].y - b[i].y)});
  return m;
}

inline double max_abs_diff(const std::vector<Mat2d>& a, const std::vector<Mat2d>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max({m, std::abs(a[i].xx - b[i].xx), std::abs(a[i].xy - b[i].xy),
                  std::abs(a[i].yx - b[i].yx), std::abs(a[i].yy - b[i].yy)});
  return m;
}

/// Small rope for fast end-to-end tests: 0.4 m, 160 particles.
inline RopeConfig small_rope_config() {
  RopeConfig c;
  c.length = 0.4;
  c.clearance_below = 0.3;
  c.clearance_above = 0.3;
  c.relax_duration = 1.5;
  return c;
}

inline bool same_state(const ParticleSet<double>& a, const ParticleSet<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t p = 0; p < a.size(); ++p) {
    if (a.x[p].x != b.x[p].x || a.x[p].y != b.x[p].y || a.v[p].x != b.v[p].x ||
        a.v[p].y != b.v[p].y || a.F[p].xx != b.F[p].xx || a.F[p].xy != b.F[p].xy ||
        a.F[p].yx != b.F[p].yx || a.F[p].yy != b.F[p].yy)
      return false;
  }
  return true;
}

}  // namespace dmpm::test

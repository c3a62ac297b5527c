#pragma once

#include <functional>

#include "dmpm/materials/svk.hpp"
#include "dmpm/mpm/particles.hpp"

namespace dmpm {

/// Fills the rectangle [lo, lo + size] with ppc x ppc regularly spaced
/// particles per cell of size h, at rest, F = I. Particle mass is
/// rho0 * h^2 / ppc^2 (plane strain, unit thickness).
inline ParticleSet<double> seed_rectangle(const Vec2d& lo, const Vec2d& size, double h, int ppc,
                                          double density) {
  const int cx = static_cast<int>(std::lround(size.x / h));
  const int cy = static_cast<int>(std::lround(size.y / h));
  if (cx < 1 || cy < 1 || std::abs(cx * h - size.x) > 1e-9 || std::abs(cy * h - size.y) > 1e-9)
    throw ConfigError("body dimensions must be whole multiples of the grid spacing");
  const double spacing = h / ppc;
  const double vol0 = spacing * spacing;
  ParticleSet<double> s;
  for (int j = 0; j < cy * ppc; ++j) {
    for (int i = 0; i < cx * ppc; ++i) {
      s.add(Vec2d(lo.x + (i + 0.5) * spacing, lo.y + (j + 0.5) * spacing), Vec2d::Zero(),
            density * vol0, vol0);
    }
  }
  return s;
}

}  // namespace dmpm

// Free flexing beam for the energy-conservation comparison: no gravity,
// no boundary conditions, no damping by default, cosine initial velocity profile.
#pragma once

#include <cmath>
#include <numbers>

#include "dmpm/integrate/integrators.hpp"
#include "dmpm/scenarios/seeding.hpp"

namespace dmpm {

struct BeamConfig {
  double length = 1.0;
  double height = 0.1;
  double h = 0.0125;
  int particles_per_cell = 2;
  double youngs_modulus = 1.5e6;
  double poisson_ratio = 0.47;
  double density = 1100.0;
  /// Zero for the conservation experiment.
  double lambda_d = 0.0;
  double mu_d = 0.0;
  double amplitude = 0.5;
  double cfl = 0.4;
  /// Free space around the beam for its flexing excursion (m).
  double clearance = 0.3;
};

inline constexpr double kBeamTimeQuantum = 0.01;

struct BeamScenario {
  BeamConfig config;
  Model model;
  ParticleSet<double> state;
  /// Phase origin and period length of the cosine profile.
  double x0 = 0.0;
  double hx = 0.0;
  double dt = 0.0;
};

/// v_y = A cos(2 pi (x - x0) / hx), v_x = 0.
inline void set_cosine_velocity(ParticleSet<double>& s, double amplitude, double x0, double hx) {
  for (std::size_t p = 0; p < s.size(); ++p) {
    s.v[p] = Vec2d(0.0, amplitude * std::cos(2.0 * std::numbers::pi * (s.x[p].x - x0) / hx));
  }
}

/// Beam with its lower-left corner at the origin. The profile's phase is
/// anchored at the leftmost particle column and hx spans to the rightmost
/// column, so both end columns move up with v_y = A.
inline BeamScenario build_beam(const BeamConfig& cfg) {
  if (!(cfg.amplitude > 0.0)) throw ConfigError("beam velocity amplitude must be positive");
  BeamScenario sc;
  sc.config = cfg;
  Model& m = sc.model;
  m.material = MaterialParams::FromYoungPoisson(cfg.youngs_modulus, cfg.poisson_ratio, cfg.density,
                                                cfg.lambda_d, cfg.mu_d);
  m.gravity = Vec2d::Zero();
  m.grid = GridSpec::Covering(Vec2d(-cfg.clearance, -cfg.clearance),
                              Vec2d(cfg.length + cfg.clearance, cfg.height + cfg.clearance), cfg.h,
                              3);
  m.grid.origin = Vec2d(std::round(m.grid.origin.x / cfg.h) * cfg.h,
                        std::round(m.grid.origin.y / cfg.h) * cfg.h);

  sc.state = seed_rectangle(Vec2d(0.0, 0.0), Vec2d(cfg.length, cfg.height), cfg.h,
                            cfg.particles_per_cell, cfg.density);
  const double spacing = cfg.h / cfg.particles_per_cell;
  sc.x0 = 0.5 * spacing;
  sc.hx = cfg.length - spacing;
  set_cosine_velocity(sc.state, cfg.amplitude, sc.x0, sc.hx);
  // Largest CFL-admissible step dividing 10 ms, so any duration on that
  // grid is a whole number of steps.
  sc.dt = kBeamTimeQuantum / static_cast<double>(steps_per_hold(kBeamTimeQuantum, cfl_time_step(m, cfg.cfl)));
  return sc;
}

}  // namespace dmpm

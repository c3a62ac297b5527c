// Hanging rope for the active-damping task: clamped on the left, x-fixed
// and vertically velocity-controlled on the right, under gravity.
#pragma once

#include <cmath>
#include <numbers>

#include "dmpm/integrate/rollout.hpp"
#include "dmpm/mpm/shape.hpp"
#include "dmpm/scenarios/seeding.hpp"

namespace dmpm {

struct RopeConfig {
  double length = 1.0;
  double thickness = 0.04;
  double h = 0.02;
  int particles_per_cell = 2;
  double youngs_modulus = 1.5e6;
  double poisson_ratio = 0.47;
  double density = 1100.0;
  double lambda_d = 50.0;
  double mu_d = 50.0;
  Vec2d gravity = Vec2d(0.0, -9.81);
  double cfl = 1.0;

  double hold = 0.05;
  double disturbance_amplitude = 2.0;
  double disturbance_duration = 0.4;
  double horizon = 2.0;

  /// Free space kept around the rope (m): sideways, below, above.
  double clearance_side = 0.1;
  double clearance_below = 0.6;
  double clearance_above = 0.5;

  double relax_duration = 10.0;
  double relax_drag = 0.0;
  double relax_energy_tol = 1e-6;
};

struct RelaxResult {
  ParticleSet<double> state;
  bool settled = false;
  double elapsed = 0.0;
  double final_kinetic = 0.0;
};

struct RopeScenario {
  RopeConfig config;
  Model model;
  /// Relaxed hanging state at t = 0.
  ParticleSet<double> state;
  ControlSequence disturbance;
  double dt = 0.0;
  long steps_per_hold = 0;
  bool settled = false;

  double disturbance_end() const { return disturbance.t_end(); }
  /// Number of hold intervals after the disturbance up to the horizon.
  int control_steps() const {
    return static_cast<int>(std::lround((config.horizon - disturbance_end()) / config.hold));
  }
};

/// v_y(t) = A sin(2 pi t / duration), sampled at the start of each hold.
inline ControlSequence disturbance_sequence(const RopeConfig& cfg) {
  ControlSequence seq;
  seq.hold = cfg.hold;
  seq.t_start = 0.0;
  seq.channel = 0;
  const long n = std::lround(cfg.disturbance_duration / cfg.hold);
  for (long k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * cfg.hold;
    seq.values.push_back(cfg.disturbance_amplitude *
                         std::sin(2.0 * std::numbers::pi * t / cfg.disturbance_duration));
  }
  return seq;
}

/// Settles `state` under zero control with boosted material damping
/// (10x, at least 500 Pa s) and an optional velocity drag, until the
/// kinetic energy stays below tol or `duration` elapses. Velocities of the
/// returned state are zeroed.
///
/// Kinetic damping: whenever the kinetic energy passes a peak all particle
/// velocities are reset to zero. This also removes velocity the grid cannot
/// see (the null space of P2G), which no grid-level damping reaches. The
/// state counts as settled once a peak stays below tol.
inline RelaxResult relax_to_steady(const ParticleSet<double>& state, const Model& model,
                                   double dt, double duration, double drag = 0.0,
                                   double energy_tol = 1e-6) {
  Model relax = model;
  relax.material.lambda_d = std::max(10.0 * model.material.lambda_d, 500.0);
  relax.material.mu_d = std::max(10.0 * model.material.mu_d, 500.0);
  relax.drag = drag;

  RelaxResult out;
  out.state = state;
  std::vector<double> u(static_cast<std::size_t>(model.bc.channels_required()), 0.0);
  Integrator<double> integ;
  const long max_steps = static_cast<long>(std::ceil(duration / dt));
  constexpr double kMinElapsed = 0.2;
  long k = 0;
  double prev = kinetic_energy(out.state);
  while (k < max_steps) {
    integ.rk4(out.state, relax, std::span<const double>(u), dt);
    ++k;
    const double ke = kinetic_energy(out.state);
    if (ke < prev) {
      out.final_kinetic = prev;
      for (auto& v : out.state.v) v = Vec2d::Zero();
      if (prev < energy_tol && k * dt > kMinElapsed) {
        out.settled = true;
        break;
      }
      prev = 0.0;
    } else {
      prev = ke;
    }
  }
  if (!out.settled) out.final_kinetic = kinetic_energy(out.state);
  out.elapsed = k * dt;
  for (auto& v : out.state.v) v = Vec2d::Zero();
  return out;
}

/// Node columns covered by the stencils of particles at horizontal position x.
inline std::pair<int, int> stencil_columns(const GridSpec& grid, double x) {
  const double xi = (x - grid.origin.x) / grid.h;
  const int base = static_cast<int>(std::floor(xi - 0.5));
  return {base, base + 2};
}

/// Builds the rope at rest, straight, with its lower-left corner at the origin.
inline RopeScenario build_rope_unrelaxed(const RopeConfig& cfg) {
  RopeScenario sc;
  sc.config = cfg;
  Model& m = sc.model;
  m.material = MaterialParams::FromYoungPoisson(cfg.youngs_modulus, cfg.poisson_ratio, cfg.density,
                                                cfg.lambda_d, cfg.mu_d);
  m.gravity = cfg.gravity;
  const int margin = 3;
  m.grid = GridSpec::Covering(Vec2d(-cfg.clearance_side, -cfg.clearance_below),
                              Vec2d(cfg.length + cfg.clearance_side,
                                    cfg.thickness + cfg.clearance_above),
                              cfg.h, margin);
  // Align grid lines with the rope edges.
  const double shift_x = std::round(m.grid.origin.x / cfg.h) * cfg.h;
  const double shift_y = std::round(m.grid.origin.y / cfg.h) * cfg.h;
  m.grid.origin = Vec2d(shift_x, shift_y);

  sc.state = seed_rectangle(Vec2d(0.0, 0.0), Vec2d(cfg.length, cfg.thickness), cfg.h,
                            cfg.particles_per_cell, cfg.density);
  const double spacing = cfg.h / cfg.particles_per_cell;

  // Full-height node strips under the end particle columns, so the
  // constraints follow the rope ends vertically.
  const auto [l0, l1] = stencil_columns(m.grid, 0.5 * spacing);
  const auto [r0, r1] = stencil_columns(m.grid, cfg.length - 0.5 * spacing);
  if (l1 >= r0) throw ConfigError("rope too short for separate clamp and control regions");
  BoundaryRegion clamp{"clamp",
                       select_nodes(m.grid, [l0 = l0, l1 = l1](int i, int, const Vec2d&) {
                         return i >= l0 && i <= l1;
                       }),
                       {AxisConstraint::Fixed(), AxisConstraint::Fixed()}};
  BoundaryRegion control{"control",
                         select_nodes(m.grid, [r0 = r0, r1 = r1](int i, int, const Vec2d&) {
                           return i >= r0 && i <= r1;
                         }),
                         {AxisConstraint::Fixed(), AxisConstraint::Channel(0)}};
  m.bc.regions = {std::move(clamp), std::move(control)};
  m.bc.validate(m.grid);

  sc.disturbance = disturbance_sequence(cfg);
  sc.steps_per_hold = steps_per_hold(cfg.hold, cfl_time_step(m, cfg.cfl));
  sc.dt = cfg.hold / static_cast<double>(sc.steps_per_hold);
  return sc;
}

/// Rope scenario starting from the relaxed hanging steady state.
inline RopeScenario build_rope(const RopeConfig& cfg) {
  RopeScenario sc = build_rope_unrelaxed(cfg);
  RelaxResult r = relax_to_steady(sc.state, sc.model, sc.dt, cfg.relax_duration, cfg.relax_drag,
                                  cfg.relax_energy_tol);
  sc.state = std::move(r.state);
  sc.settled = r.settled;
  return sc;
}

}  // namespace dmpm

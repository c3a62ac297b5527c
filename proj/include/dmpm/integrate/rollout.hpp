#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "dmpm/integrate/integrators.hpp"
#include "dmpm/mpm/flip.hpp"

namespace dmpm {

/// Per-step running cost c(S, u).
using StepCost = std::function<double(const ParticleSet<double>&, double control)>;

/// Kinetic-energy state cost, sum_p 1/2 m_p |v_p|^2.
inline double kinetic_cost(const ParticleSet<double>& s, double /*control*/) {
  return kinetic_energy(s);
}

struct RolloutRecord {
  std::vector<double> time;
  std::vector<double> e_kin;
  std::vector<double> e_strain;
  std::vector<double> e_total;
  std::vector<double> control;
  /// Sum of the step cost sampled after every step.
  double cost = 0.0;
  long steps = 0;
  ParticleSet<double> final_state;

  void sample(double t, const ParticleSet<double>& s, const MaterialParams& mat, double u) {
    const Energies e = energies(s, mat);
    time.push_back(t);
    e_kin.push_back(e.kinetic);
    e_strain.push_back(e.strain);
    e_total.push_back(e.total);
    control.push_back(u);
  }
};

enum class StepScheme { kRK4, kEuler, kFlipUSL };

struct RolloutOptions {
  double t0 = 0.0;
  double t1 = 0.0;
  double dt = 0.0;
  /// Record energies every this many steps (and at both ends); 0 disables.
  long record_every = 10;
  StepScheme scheme = StepScheme::kRK4;
  StepCost cost = kinetic_cost;
};

/// Number of steps covering [t0, t1]; the interval must be a whole
/// multiple of dt up to rounding.
inline long step_count(double t0, double t1, double dt) {
  if (!(dt > 0.0)) throw ConfigError("time step must be positive");
  const double span = t1 - t0;
  if (span < 0.0) throw ConfigError("rollout end time precedes start time");
  const double n = std::round(span / dt);
  if (std::abs(n * dt - span) > 1e-6 * dt)
    throw ConfigError("rollout duration is not an integer multiple of the time step");
  return static_cast<long>(n);
}

/// Integrates from t0 to t1 applying `controls` (optional) to channel
/// controls->channel of the boundary conditions.
inline RolloutRecord rollout(const ParticleSet<double>& state0, const Model& model,
                             const ControlSequence* controls, const RolloutOptions& opt) {
  const long steps = step_count(opt.t0, opt.t1, opt.dt);
  std::vector<double> u(static_cast<std::size_t>(model.bc.channels_required()), 0.0);
  auto control_at = [&](double t) {
    if (controls == nullptr) return 0.0;
    const double val = controls->at(t);
    if (static_cast<std::size_t>(controls->channel) < u.size()) u[controls->channel] = val;
    return val;
  };

  RolloutRecord rec;
  ParticleSet<double> s = state0;
  Integrator<double> integ;
  FlipWorkspace<double> flip_ws;
  if (opt.record_every > 0) rec.sample(opt.t0, s, model.material, control_at(opt.t0));

  for (long k = 0; k < steps; ++k) {
    const double t = opt.t0 + static_cast<double>(k) * opt.dt;
    const double uk = control_at(t);
    const std::span<const double> cs(u);
    try {
      switch (opt.scheme) {
        case StepScheme::kRK4:
          integ.rk4(s, model, cs, opt.dt);
          break;
        case StepScheme::kEuler:
          integ.euler(s, model, cs, opt.dt);
          break;
        case StepScheme::kFlipUSL:
          flip_usl_step(s, model, cs, opt.dt, flip_ws);
          break;
      }
    } catch (SimulationError& e) {
      e.set_step(k);
      throw;
    }
    rec.cost += opt.cost(s, uk);
    const long done = k + 1;
    if (opt.record_every > 0 && (done % opt.record_every == 0 || done == steps)) {
      const double tn = opt.t0 + static_cast<double>(done) * opt.dt;
      rec.sample(tn, s, model.material, controls ? controls->at(tn) : 0.0);
    }
  }
  rec.steps = steps;
  rec.final_state = std::move(s);
  return rec;
}

}  // namespace dmpm

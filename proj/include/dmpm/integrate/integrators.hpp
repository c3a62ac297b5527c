// Explicit integrators for the derivative-form MPM ODE.
#pragma once

#include <span>

#include "dmpm/mpm/derivative.hpp"

namespace dmpm {

/// Owns the scratch buffers for repeated steps on one state size.
/// Controls are held constant across all stages of a step (zero-order hold).
template <typename T>
class Integrator {
 public:
  void euler(ParticleSet<T>& s, const Model& model, std::span<const T> controls, double dt) {
    derivative_eval(s, model, controls, ws_, k1_);
    axpy_state(s, dt, k1_, s);
  }

  void rk4(ParticleSet<T>& s, const Model& model, std::span<const T> controls, double dt) {
    derivative_eval(s, model, controls, ws_, k1_);
    axpy_state(s, 0.5 * dt, k1_, tmp_);
    derivative_eval(tmp_, model, controls, ws_, k2_);
    axpy_state(s, 0.5 * dt, k2_, tmp_);
    derivative_eval(tmp_, model, controls, ws_, k3_);
    axpy_state(s, dt, k3_, tmp_);
    derivative_eval(tmp_, model, controls, ws_, k4_);
    const double c = dt / 6.0;
    for (std::size_t p = 0; p < s.size(); ++p) {
      s.x[p] += c * (k1_.xdot[p] + 2.0 * (k2_.xdot[p] + k3_.xdot[p]) + k4_.xdot[p]);
      s.v[p] += c * (k1_.vdot[p] + 2.0 * (k2_.vdot[p] + k3_.vdot[p]) + k4_.vdot[p]);
      s.F[p] += c * (k1_.Fdot[p] + 2.0 * (k2_.Fdot[p] + k3_.Fdot[p]) + k4_.Fdot[p]);
    }
  }

  Workspace<T>& workspace() { return ws_; }

 private:
  Workspace<T> ws_;
  StateDerivative<T> k1_, k2_, k3_, k4_;
  ParticleSet<T> tmp_;
};

template <typename T>
ParticleSet<T> euler_step(ParticleSet<T> s, const Model& model, std::span<const T> controls,
                          double dt) {
  Integrator<T> integ;
  integ.euler(s, model, controls, dt);
  return s;
}

template <typename T>
ParticleSet<T> rk4_step(ParticleSet<T> s, const Model& model, std::span<const T> controls,
                        double dt) {
  Integrator<T> integ;
  integ.rk4(s, model, controls, dt);
  return s;
}

/// Time step from the CFL bound: cfl * h / sqrt((lambda + 2 mu) / rho0).
inline double cfl_time_step(const Model& model, double cfl) {
  return cfl * model.grid.h / model.material.wave_speed();
}

/// Largest dt <= dt_max that divides `hold` into an integer number of steps.
inline long steps_per_hold(double hold, double dt_max) {
  return static_cast<long>(std::ceil(hold / dt_max - 1e-9));
}

}  // namespace dmpm

// Windowed differentiable rollout: the accumulated kinetic cost of N
// zero-order-hold control intervals, and its exact gradient with respect
// to those N control values.
//
// The gradient is computed in forward mode: the window is re-simulated with
// Dual<kLanes> scalars whose tangent lanes are seeded by the controls. The
// tangent of control i is identically zero before hold i starts, so each
// chunk of lanes only begins carrying tangents at its first control.
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "dmpm/core/dual.hpp"
#include "dmpm/integrate/integrators.hpp"

namespace dmpm {

struct WindowSpec {
  /// Control intervals in the window.
  int controls = 8;
  /// Integration steps per control interval (hold / dt).
  long steps_per_control = 1;
  double dt = 0.0;
  /// Boundary-condition channel the controls drive.
  int channel = 0;

  double hold() const { return dt * static_cast<double>(steps_per_control); }
  long total_steps() const { return steps_per_control * controls; }
};

template <typename T>
T kinetic_cost_t(const ParticleSet<T>& s) {
  T ek(0.0);
  for (std::size_t p = 0; p < s.size(); ++p) ek += (0.5 * s.mass[p]) * squared_norm(s.v[p]);
  return ek;
}

template <typename T>
struct WindowResult {
  T cost{0.0};
  ParticleSet<T> end_state;
};

/// Rolls the window out with RK4, control theta[i] held over interval i, and
/// accumulates the kinetic cost after every step. `state` is advanced in place.
template <typename T>
T window_cost_inplace(ParticleSet<T>& state, std::span<const T> theta, const WindowSpec& w,
                      const Model& model, Integrator<T>& integ) {
  if (static_cast<int>(theta.size()) != w.controls)
    throw ConfigError("window control vector length does not match the window");
  std::vector<T> u(static_cast<std::size_t>(std::max(model.bc.channels_required(), w.channel + 1)),
                   T(0.0));
  T cost(0.0);
  long step = 0;
  for (int i = 0; i < w.controls; ++i) {
    u[static_cast<std::size_t>(w.channel)] = theta[static_cast<std::size_t>(i)];
    for (long s = 0; s < w.steps_per_control; ++s, ++step) {
      try {
        integ.rk4(state, model, std::span<const T>(u), w.dt);
      } catch (SimulationError& e) {
        e.set_step(step);
        throw;
      }
      cost += kinetic_cost_t(state);
    }
  }
  return cost;
}

inline WindowResult<double> window_cost(const ParticleSet<double>& state,
                                        std::span<const double> theta, const WindowSpec& w,
                                        const Model& model) {
  WindowResult<double> r;
  r.end_state = state;
  Integrator<double> integ;
  r.cost = window_cost_inplace(r.end_state, theta, w, model, integ);
  return r;
}

struct WindowGradient {
  double cost = 0.0;
  std::vector<double> grad;
  ParticleSet<double> end_state;
};

inline constexpr std::size_t kLanes = 8;
using GradScalar = Dual<kLanes>;

/// Exact d(window cost)/d(theta) by forward-mode propagation, in chunks of
/// kLanes controls. Also returns the cost and end state.
inline WindowGradient window_grad(const ParticleSet<double>& state,
                                  std::span<const double> theta, const WindowSpec& w,
                                  const Model& model) {
  if (static_cast<int>(theta.size()) != w.controls)
    throw ConfigError("window control vector length does not match the window");
  WindowGradient out;
  out.grad.assign(theta.size(), 0.0);
  const int n = w.controls;
  Integrator<double> integ_d;
  Integrator<GradScalar> integ;
  std::vector<double> u(static_cast<std::size_t>(std::max(model.bc.channels_required(), w.channel + 1)),
                        0.0);

  for (int first = 0; first < n; first += static_cast<int>(kLanes)) {
    const int last = std::min(n, first + static_cast<int>(kLanes));
    // Plain double rollout up to the first control of the chunk: no tangents yet.
    ParticleSet<double> pre = state;
    double cost_pre = 0.0;
    for (int i = 0; i < first; ++i) {
      u[static_cast<std::size_t>(w.channel)] = theta[static_cast<std::size_t>(i)];
      for (long s = 0; s < w.steps_per_control; ++s) {
        integ_d.rk4(pre, model, std::span<const double>(u), w.dt);
        cost_pre += kinetic_energy(pre);
      }
    }
    ParticleSet<GradScalar> s = lift_state<GradScalar>(pre);
    std::vector<GradScalar> tail;
    for (int i = first; i < n; ++i) {
      const double th = theta[static_cast<std::size_t>(i)];
      tail.push_back(i < last ? GradScalar::Variable(th, static_cast<std::size_t>(i - first))
                              : GradScalar(th));
    }
    WindowSpec rest = w;
    rest.controls = n - first;
    const GradScalar c = window_cost_inplace(s, std::span<const GradScalar>(tail), rest, model, integ);
    for (int i = first; i < last; ++i) out.grad[static_cast<std::size_t>(i)] = c.d[static_cast<std::size_t>(i - first)];
    if (first == 0) {
      out.cost = cost_pre + c.v;
      out.end_state = primal_state(s);
    }
  }
  return out;
}

/// Scalar the finite-difference probes are rolled out in. Extended
/// precision (x87 long double) keeps the cancellation error of small steps
/// below the truncation error.
enum class FdPrecision { kDouble, kExtended };

struct GradcheckOptions {
  double delta = 1e-9;
  FdPrecision precision = FdPrecision::kExtended;
  /// Also compare against differences at delta / 10.
  bool fine_step = true;
};

struct GradientReport {
  std::vector<double> grad;
  std::vector<double> fd;
  /// Empty unless the fine step was requested.
  std::vector<double> fd_fine;
  std::vector<double> rel_error;
  std::vector<double> rel_error_fine;
  double delta = 0.0;
  FdPrecision precision = FdPrecision::kDouble;
  double max_rel_error = 0.0;
  double max_rel_error_fine = 0.0;
  double cost = 0.0;
};

/// Central differences of `cost` at theta, step delta per component.
template <typename CostFn>
std::vector<double> central_differences(CostFn&& cost, std::span<const double> theta,
                                        double delta) {
  if (!(delta > 0.0)) throw ConfigError("finite-difference step must be positive");
  std::vector<double> probe(theta.begin(), theta.end());
  std::vector<double> g(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    probe[i] = theta[i] + delta;
    const double cp = cost(std::span<const double>(probe));
    probe[i] = theta[i] - delta;
    const double cm = cost(std::span<const double>(probe));
    probe[i] = theta[i];
    g[i] = (cp - cm) / (2.0 * delta);
  }
  return g;
}

/// Central differences with the probes, the step and the difference all
/// carried in scalar S.
template <typename S>
std::vector<double> fd_oracle_as(const ParticleSet<double>& state, std::span<const double> theta,
                                 const WindowSpec& w, const Model& model, double delta) {
  if (!(delta > 0.0)) throw ConfigError("finite-difference step must be positive");
  const ParticleSet<S> s0 = lift_state<S>(state);
  Integrator<S> integ;
  std::vector<S> probe(theta.begin(), theta.end());
  std::vector<double> g(theta.size());
  auto cost = [&] {
    ParticleSet<S> s = s0;
    return window_cost_inplace<S>(s, std::span<const S>(probe), w, model, integ);
  };
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const S t = S(theta[i]);
    probe[i] = t + S(delta);
    const S cp = cost();
    probe[i] = t - S(delta);
    const S cm = cost();
    probe[i] = t;
    g[i] = static_cast<double>((cp - cm) / (S(2) * S(delta)));
  }
  return g;
}

/// Finite-difference oracle for window_grad: each probe is a full window rollout.
inline std::vector<double> fd_oracle(const ParticleSet<double>& state,
                                     std::span<const double> theta, const WindowSpec& w,
                                     const Model& model, double delta,
                                     FdPrecision precision = FdPrecision::kDouble) {
  if (precision == FdPrecision::kExtended)
    return fd_oracle_as<long double>(state, theta, w, model, delta);
  return central_differences(
      [&](std::span<const double> th) { return window_cost(state, th, w, model).cost; }, theta,
      delta);
}

/// Per-component relative error; components below 1e-8 |g|_inf are compared
/// as absolute error scaled by |g|_inf.
inline std::vector<double> gradient_errors(std::span<const double> g,
                                           std::span<const double> ref) {
  double gmax = 0.0;
  for (double x : g) gmax = std::max(gmax, std::abs(x));
  std::vector<double> err(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double diff = std::abs(g[i] - ref[i]);
    if (gmax == 0.0) {
      err[i] = diff;
    } else if (std::abs(g[i]) < 1e-8 * gmax) {
      err[i] = diff / gmax;
    } else {
      err[i] = diff / std::abs(g[i]);
    }
  }
  return err;
}

inline double max_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, x);
  return m;
}

inline GradientReport check_gradient(const ParticleSet<double>& state,
                                     std::span<const double> theta, const WindowSpec& w,
                                     const Model& model, const GradcheckOptions& opt = {}) {
  GradientReport rep;
  const WindowGradient wg = window_grad(state, theta, w, model);
  rep.grad = wg.grad;
  rep.cost = wg.cost;
  rep.delta = opt.delta;
  rep.precision = opt.precision;
  rep.fd = fd_oracle(state, theta, w, model, opt.delta, opt.precision);
  rep.rel_error = gradient_errors(rep.grad, rep.fd);
  rep.max_rel_error = max_of(rep.rel_error);
  if (opt.fine_step) {
    rep.fd_fine = fd_oracle(state, theta, w, model, opt.delta / 10.0, opt.precision);
    rep.rel_error_fine = gradient_errors(rep.grad, rep.fd_fine);
    rep.max_rel_error_fine = max_of(rep.rel_error_fine);
  }
  return rep;
}

}  // namespace dmpm

// Windowed gradient-based trajectory optimization of the rope's controlled
// end velocity. Windows are optimized one after another; each starts from
// the end state of the previous window under its optimized controls.
#pragma once

#include <algorithm>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "dmpm/control/adam.hpp"
#include "dmpm/grad/window.hpp"
#include "dmpm/integrate/rollout.hpp"
#include "dmpm/scenarios/rope.hpp"

namespace dmpm {

struct OptimizerConfig {
  int window_controls = 8;
  int iterations = 50;
  AdamParams adam;
  std::uint64_t seed = 0;
  /// Initial controls are drawn from U[-init_range, init_range].
  double init_range = 0.1;
  /// Optional symmetric bound on the controls (m/s).
  std::optional<double> clamp;
  long record_every = 10;
};

struct WindowOptimization {
  std::vector<double> theta0;
  std::vector<double> theta;
  /// Cost of the iterate evaluated at each iteration.
  std::vector<double> cost_trace;
  /// Best cost seen up to and including each iteration.
  std::vector<double> best_trace;
  double best_cost = 0.0;
  int best_iteration = 0;
  int iterations = 0;
  ParticleSet<double> end_state;
};

/// Objective/gradient pair evaluated by optimize_window_with.
struct CostAndGrad {
  double cost = 0.0;
  std::vector<double> grad;
};

/// Adam loop with best-iterate return over an arbitrary differentiable cost.
template <typename Fn>
WindowOptimization optimize_window_with(Fn&& cost_and_grad, std::vector<double> theta0,
                                        int iterations, const AdamParams& adam,
                                        std::optional<double> clamp = std::nullopt) {
  WindowOptimization out;
  out.theta0 = theta0;
  std::vector<double> theta = std::move(theta0);
  if (clamp)
    for (double& t : theta) t = std::clamp(t, -*clamp, *clamp);
  AdamState st(theta.size(), adam);
  out.best_cost = std::numeric_limits<double>::infinity();
  out.theta = theta;
  for (int it = 0; it < iterations; ++it) {
    CostAndGrad cg;
    try {
      cg = cost_and_grad(std::span<const double>(theta));
    } catch (SimulationError& e) {
      throw SimulationError(e.kind(), "optimization iteration " + std::to_string(it) + ": " +
                                          e.what());
    }
    out.cost_trace.push_back(cg.cost);
    if (cg.cost < out.best_cost) {
      out.best_cost = cg.cost;
      out.best_iteration = it;
      out.theta = theta;
    }
    out.best_trace.push_back(out.best_cost);
    adam_step(std::span<double>(theta), std::span<const double>(cg.grad), st);
    if (clamp)
      for (double& t : theta) t = std::clamp(t, -*clamp, *clamp);
  }
  out.iterations = iterations;
  if (iterations == 0) out.best_cost = cost_and_grad(std::span<const double>(out.theta)).cost;
  return out;
}

/// Optimizes one window of controls from `state`; the end state is
/// re-simulated under the best controls.
inline WindowOptimization optimize_window(const ParticleSet<double>& state,
                                          std::vector<double> theta0, const WindowSpec& w,
                                          const Model& model, int iterations,
                                          const AdamParams& adam,
                                          std::optional<double> clamp = std::nullopt) {
  auto fn = [&](std::span<const double> th) {
    WindowGradient g = window_grad(state, th, w, model);
    return CostAndGrad{g.cost, std::move(g.grad)};
  };
  WindowOptimization out = optimize_window_with(fn, std::move(theta0), iterations, adam, clamp);
  WindowResult<double> r = window_cost(state, std::span<const double>(out.theta), w, model);
  out.end_state = std::move(r.end_state);
  return out;
}

struct OptimizationRun {
  std::uint64_t seed = 0;
  /// Post-disturbance controls only.
  ControlSequence initial;
  ControlSequence optimized;
  std::vector<WindowOptimization> windows;
  /// Disturbance followed by the initial / optimized controls, from t = 0.
  ControlSequence initial_full;
  ControlSequence optimized_full;
  RolloutRecord initial_record;
  RolloutRecord optimized_record;
};

/// Uniform initial controls for the post-disturbance phase.
inline std::vector<double> random_controls(std::size_t n, double range, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-range, range);
  std::vector<double> u(n);
  for (double& x : u) x = dist(rng);
  return u;
}

/// Rollout over [0, horizon] of the rope under `controls` (starting at t = 0).
inline RolloutRecord rope_rollout(const RopeScenario& sc, const ControlSequence& controls,
                                  long record_every = 10) {
  RolloutOptions opt;
  opt.t0 = 0.0;
  opt.t1 = sc.config.horizon;
  opt.dt = sc.dt;
  opt.record_every = record_every;
  return rollout(sc.state, sc.model, &controls, opt);
}

/// State at the end of the disturbance phase.
inline ParticleSet<double> disturbed_state(const RopeScenario& sc) {
  RolloutOptions opt;
  opt.t0 = 0.0;
  opt.t1 = sc.disturbance_end();
  opt.dt = sc.dt;
  opt.record_every = 0;
  return rollout(sc.state, sc.model, &sc.disturbance, opt).final_state;
}

/// Post-disturbance sequence of n holds.
inline ControlSequence post_disturbance_sequence(const RopeScenario& sc, std::vector<double> v) {
  ControlSequence seq;
  seq.values = std::move(v);
  seq.hold = sc.config.hold;
  seq.t_start = sc.disturbance_end();
  seq.channel = sc.disturbance.channel;
  return seq;
}

inline OptimizationRun optimize_trajectory(const RopeScenario& sc, const OptimizerConfig& cfg) {
  if (cfg.window_controls < 1) throw ConfigError("window must hold at least one control");
  if (cfg.iterations < 0) throw ConfigError("iteration count must be non-negative");
  OptimizationRun run;
  run.seed = cfg.seed;
  const int total = sc.control_steps();
  run.initial = post_disturbance_sequence(
      sc, random_controls(static_cast<std::size_t>(total), cfg.init_range, cfg.seed));

  ParticleSet<double> state = disturbed_state(sc);
  std::vector<double> optimized;
  for (int first = 0; first < total; first += cfg.window_controls) {
    const int n = std::min(cfg.window_controls, total - first);
    WindowSpec w;
    w.controls = n;
    w.steps_per_control = sc.steps_per_hold;
    w.dt = sc.dt;
    w.channel = sc.disturbance.channel;
    std::vector<double> theta0(run.initial.values.begin() + first,
                               run.initial.values.begin() + first + n);
    WindowOptimization wo =
        optimize_window(state, std::move(theta0), w, sc.model, cfg.iterations, cfg.adam, cfg.clamp);
    optimized.insert(optimized.end(), wo.theta.begin(), wo.theta.end());
    state = wo.end_state;
    wo.end_state = ParticleSet<double>();
    run.windows.push_back(std::move(wo));
  }
  run.optimized = post_disturbance_sequence(sc, std::move(optimized));
  run.initial_full = ControlSequence::Concatenate(sc.disturbance, run.initial);
  run.optimized_full = ControlSequence::Concatenate(sc.disturbance, run.optimized);
  run.initial_record = rope_rollout(sc, run.initial_full, cfg.record_every);
  run.optimized_record = rope_rollout(sc, run.optimized_full, cfg.record_every);
  return run;
}

}  // namespace dmpm

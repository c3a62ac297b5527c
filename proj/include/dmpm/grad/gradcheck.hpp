// Gradient checks on rope windows drawn from the disturbed no-action run.
#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "dmpm/control/optimize.hpp"
#include "dmpm/grad/window.hpp"

namespace dmpm {

struct WindowCase {
  double t_start = 0.0;
  ParticleSet<double> state;
  std::vector<double> theta;
};

/// `count` distinct hold-aligned window starts after the disturbance such
/// that the whole window fits before the horizon, each with controls drawn
/// from U[-range, range].
inline std::vector<WindowCase> random_window_cases(const RopeScenario& sc, int count,
                                                   int window_controls, double range,
                                                   std::uint64_t seed) {
  const int last_start = sc.control_steps() - window_controls;
  if (last_start < 0) throw ConfigError("window longer than the controlled phase");
  std::mt19937_64 rng(seed);
  std::vector<int> starts(static_cast<std::size_t>(last_start + 1));
  for (std::size_t i = 0; i < starts.size(); ++i) starts[i] = static_cast<int>(i);
  std::shuffle(starts.begin(), starts.end(), rng);
  starts.resize(std::min(starts.size(), static_cast<std::size_t>(std::max(count, 0))));
  std::sort(starts.begin(), starts.end());

  std::vector<WindowCase> out;
  ParticleSet<double> s = disturbed_state(sc);
  Integrator<double> integ;
  std::vector<double> u(static_cast<std::size_t>(sc.model.bc.channels_required()), 0.0);
  std::uniform_real_distribution<double> dist(-range, range);
  int at = 0;
  for (int start : starts) {
    for (; at < start; ++at)
      for (long k = 0; k < sc.steps_per_hold; ++k)
        integ.rk4(s, sc.model, std::span<const double>(u), sc.dt);
    WindowCase c;
    c.t_start = sc.disturbance_end() + start * sc.config.hold;
    c.state = s;
    c.theta.resize(static_cast<std::size_t>(window_controls));
    for (double& x : c.theta) x = dist(rng);
    out.push_back(std::move(c));
  }
  return out;
}

inline WindowSpec rope_window(const RopeScenario& sc, int controls) {
  WindowSpec w;
  w.controls = controls;
  w.steps_per_control = sc.steps_per_hold;
  w.dt = sc.dt;
  w.channel = sc.disturbance.channel;
  return w;
}

}  // namespace dmpm

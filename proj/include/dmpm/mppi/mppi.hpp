// Sampling-based MPPI controller with receding horizon and a line search
// on the weight temperature keeping the normalization constant in range.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "dmpm/control/optimize.hpp"
#include "dmpm/grad/window.hpp"
#include "dmpm/scenarios/rope.hpp"

namespace dmpm {

struct MPPIConfig {
  int samples = 200;       // K
  int horizon = 10;        // H, in control steps
  double variance = 0.4;   // diagonal of Sigma, (m/s)^2
  /// Temperature before the line search; unset means (cost range) / 10.
  std::optional<double> beta;
  /// Admissible normalization range; unset means (0.05 K, 0.7 K).
  std::optional<double> eta_min;
  std::optional<double> eta_max;
  double beta_factor = 1.5;
  int max_search_iterations = 30;
  std::uint64_t seed = 0;
  double failure_penalty = 1e9;
  long record_every = 10;

  double resolved_eta_min() const { return eta_min.value_or(0.05 * samples); }
  double resolved_eta_max() const { return eta_max.value_or(0.7 * samples); }

  void validate() const {
    if (samples < 1) throw ConfigError("mppi: sample count must be at least 1");
    if (horizon < 1) throw ConfigError("mppi: horizon must be at least 1");
    if (!(variance > 0.0)) throw ConfigError("mppi: noise variance must be positive");
    if (beta && !(*beta > 0.0)) throw ConfigError("mppi: beta must be positive");
    const double lo = resolved_eta_min(), hi = resolved_eta_max();
    if (!(lo > 0.0 && lo < hi && hi <= samples))
      throw ConfigError("mppi: need 0 < eta_min < eta_max <= K");
    if (!(beta_factor > 1.0)) throw ConfigError("mppi: beta factor must exceed 1");
  }
};

using SampleMatrix = std::vector<std::vector<double>>;

/// K noisy copies of `mean`, each component perturbed by N(0, variance).
inline SampleMatrix sample_controls(std::span<const double> mean, const MPPIConfig& cfg,
                                    std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double sd = std::sqrt(cfg.variance);
  SampleMatrix out(static_cast<std::size_t>(cfg.samples));
  for (auto& row : out) {
    row.resize(mean.size());
    for (std::size_t i = 0; i < mean.size(); ++i) row[i] = mean[i] + sd * normal(rng);
  }
  return out;
}

/// Independent generator for sample k of control step `step`.
inline std::mt19937_64 sample_stream(std::uint64_t seed, std::uint64_t step, std::uint64_t k) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(k)};
  return std::mt19937_64(seq);
}

/// Samples for one control step, row k drawn from its own stream.
inline SampleMatrix sample_controls_split(std::span<const double> mean, const MPPIConfig& cfg,
                                          std::uint64_t step) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double sd = std::sqrt(cfg.variance);
  SampleMatrix out(static_cast<std::size_t>(cfg.samples));
  for (std::size_t k = 0; k < out.size(); ++k) {
    std::mt19937_64 rng = sample_stream(cfg.seed, step, k);
    normal.reset();  // no cached variate may leak across streams
    out[k].resize(mean.size());
    for (std::size_t i = 0; i < mean.size(); ++i) out[k][i] = mean[i] + sd * normal(rng);
  }
  return out;
}

struct WeightResult {
  std::vector<double> w;
  double eta = 0.0;
};

/// w_k = exp(-(C_k - rho) / beta) / eta with rho = min_k C_k.
inline WeightResult mppi_weights(std::span<const double> costs, double beta) {
  if (costs.empty()) throw ConfigError("mppi_weights: no costs");
  if (!(beta > 0.0)) throw ConfigError("mppi_weights: beta must be positive");
  const double rho = *std::min_element(costs.begin(), costs.end());
  WeightResult r;
  r.w.resize(costs.size());
  for (std::size_t k = 0; k < costs.size(); ++k) {
    r.w[k] = std::exp(-(costs[k] - rho) / beta);
    r.eta += r.w[k];
  }
  for (double& w : r.w) w /= r.eta;
  return r;
}

inline double normalization(std::span<const double> costs, double beta) {
  return mppi_weights(costs, beta).eta;
}

struct BetaSearch {
  double beta = 1.0;
  double eta = 0.0;
  int iterations = 0;
  bool in_range = false;
  /// Range unreachable (all costs equal): beta fell back to the configured value.
  bool fallback = false;
};

/// Geometric search on beta, in factors of cfg.beta_factor, until
/// eta(beta) lies in (eta_min, eta_max). Once the range is bracketed the
/// step is halved geometrically. eta is increasing in beta.
inline BetaSearch line_search_beta(std::span<const double> costs, const MPPIConfig& cfg) {
  const double lo = cfg.resolved_eta_min(), hi = cfg.resolved_eta_max();
  const auto [cmin, cmax] = std::minmax_element(costs.begin(), costs.end());
  const double range = *cmax - *cmin;
  BetaSearch out;
  if (!(range > 0.0)) {
    out.beta = cfg.beta.value_or(1.0);
    out.eta = static_cast<double>(costs.size());
    out.in_range = out.eta > lo && out.eta < hi;
    out.fallback = !out.in_range;
    return out;
  }
  double beta = cfg.beta.value_or(range / 10.0);
  double eta = normalization(costs, beta);
  // log-space bracket [a, b] once both sides have been seen.
  double log_step = std::log(cfg.beta_factor);
  int direction = 0;
  int it = 0;
  while (!(eta > lo && eta < hi) && it < cfg.max_search_iterations) {
    const int want = eta <= lo ? +1 : -1;
    if (direction != 0 && want != direction) log_step *= 0.5;
    direction = want;
    beta *= std::exp(want * log_step);
    eta = normalization(costs, beta);
    ++it;
  }
  out.beta = beta;
  out.eta = eta;
  out.iterations = it;
  out.in_range = eta > lo && eta < hi;
  return out;
}

struct MPPIUpdate {
  std::vector<double> u;
  BetaSearch search;
  std::vector<double> weights;
};

/// Weighted mean of the samples with weights from the searched beta.
inline MPPIUpdate mppi_update(const SampleMatrix& samples, std::span<const double> costs,
                              const MPPIConfig& cfg) {
  if (samples.size() != costs.size() || samples.empty())
    throw ConfigError("mppi_update: sample/cost count mismatch");
  MPPIUpdate out;
  out.search = line_search_beta(costs, cfg);
  out.weights = mppi_weights(costs, out.search.beta).w;
  const std::size_t h = samples.front().size();
  out.u.assign(h, 0.0);
  for (std::size_t k = 0; k < samples.size(); ++k) {
    if (samples[k].size() != h) throw ConfigError("mppi_update: ragged sample matrix");
    for (std::size_t i = 0; i < h; ++i) out.u[i] += out.weights[k] * samples[k][i];
  }
  return out;
}

struct MPPIStepInfo {
  double time = 0.0;
  double applied = 0.0;
  double beta = 0.0;
  double eta = 0.0;
  int search_iterations = 0;
  bool fallback = false;
  int failed_samples = 0;
  double best_cost = 0.0;
};

struct MPPIRun {
  std::uint64_t seed = 0;
  ControlSequence applied;
  ControlSequence applied_full;
  std::vector<MPPIStepInfo> steps;
  RolloutRecord record;
};

/// Receding-horizon MPPI on the rope after the disturbance, up to the
/// scenario horizon. Horizons are truncated at the end of the run.
inline MPPIRun receding_horizon_control(const RopeScenario& sc, const MPPIConfig& cfg) {
  cfg.validate();
  MPPIRun run;
  run.seed = cfg.seed;
  const int total = sc.control_steps();
  ParticleSet<double> state = disturbed_state(sc);
  std::vector<double> mean(static_cast<std::size_t>(cfg.horizon), 0.0);
  std::vector<double> applied;
  Integrator<double> integ;
  ParticleSet<double> probe;

  for (int j = 0; j < total; ++j) {
    const int h = std::min(cfg.horizon, total - j);
    mean.resize(static_cast<std::size_t>(h));
    const SampleMatrix samples =
        sample_controls_split(std::span<const double>(mean), cfg, static_cast<std::uint64_t>(j));
    WindowSpec w;
    w.controls = h;
    w.steps_per_control = sc.steps_per_hold;
    w.dt = sc.dt;
    w.channel = sc.disturbance.channel;
    std::vector<double> costs(samples.size());
    MPPIStepInfo info;
    info.time = sc.disturbance_end() + j * sc.config.hold;
    for (std::size_t k = 0; k < samples.size(); ++k) {
      probe = state;
      try {
        costs[k] = window_cost_inplace(probe, std::span<const double>(samples[k]), w, sc.model,
                                       integ);
        if (!std::isfinite(costs[k])) throw SimulationError(SimulationError::Kind::kNonFinite, "");
      } catch (const SimulationError&) {
        costs[k] = cfg.failure_penalty;
        ++info.failed_samples;
      }
    }
    const MPPIUpdate upd = mppi_update(samples, costs, cfg);
    info.applied = upd.u[0];
    info.beta = upd.search.beta;
    info.eta = upd.search.eta;
    info.search_iterations = upd.search.iterations;
    info.fallback = upd.search.fallback;
    info.best_cost = *std::min_element(costs.begin(), costs.end());
    run.steps.push_back(info);
    applied.push_back(upd.u[0]);

    // Advance the true system one hold.
    WindowSpec one = w;
    one.controls = 1;
    const double u0 = upd.u[0];
    window_cost_inplace(state, std::span<const double>(&u0, 1), one, sc.model, integ);

    // Shift the mean: drop the applied value, append zero.
    std::vector<double> next(upd.u.begin() + 1, upd.u.end());
    next.push_back(0.0);
    mean = std::move(next);
    mean.resize(static_cast<std::size_t>(cfg.horizon), 0.0);
  }
  run.applied = post_disturbance_sequence(sc, std::move(applied));
  run.applied_full = ControlSequence::Concatenate(sc.disturbance, run.applied);
  run.record = rope_rollout(sc, run.applied_full, cfg.record_every);
  return run;
}

}  // namespace dmpm

// Damping metrics of a kinetic-energy time series.
#pragma once

#include <algorithm>
#include <optional>
#include <span>

#include "dmpm/core/errors.hpp"

namespace dmpm {

struct DampingMetrics {
  double peak = 0.0;
  double threshold_80 = 0.0;
  double threshold_90 = 0.0;
  /// Time after the disturbance end until E_kin stays below the threshold;
  /// empty if it never does.
  std::optional<double> t_80;
  std::optional<double> t_90;
  double mean_window = 0.0;
  std::size_t window_samples = 0;
};

/// Time at which the series last crosses below `threshold` and stays there,
/// linearly interpolated between the straddling samples. Empty if the last
/// sample is not below the threshold.
inline std::optional<double> settle_time(std::span<const double> t, std::span<const double> e,
                                         double threshold) {
  if (t.empty() || !(e.back() < threshold)) return std::nullopt;
  std::size_t i = e.size();
  while (i > 0 && e[i - 1] < threshold) --i;
  if (i == 0) return t.front();
  // e[i-1] >= threshold > e[i]
  const double e0 = e[i - 1], e1 = e[i];
  const double frac = (e0 - threshold) / (e0 - e1);
  return t[i - 1] + frac * (t[i] - t[i - 1]);
}

/// Peak over the whole series; thresholds 0.2 and 0.1 of the peak; settle
/// times measured from disturbance_end (clamped at 0); mean over the
/// samples with t in [window_lo, window_hi].
inline DampingMetrics compute_metrics(std::span<const double> time, std::span<const double> e_kin,
                                      double disturbance_end, double window_lo = 1.0,
                                      double window_hi = 2.0) {
  if (time.size() != e_kin.size() || time.empty())
    throw ConfigError("compute_metrics: empty or mismatched series");
  DampingMetrics m;
  m.peak = *std::max_element(e_kin.begin(), e_kin.end());
  m.threshold_80 = 0.2 * m.peak;
  m.threshold_90 = 0.1 * m.peak;
  auto rel = [&](std::optional<double> ts) -> std::optional<double> {
    if (!ts) return std::nullopt;
    return std::max(0.0, *ts - disturbance_end);
  };
  m.t_80 = rel(settle_time(time, e_kin, m.threshold_80));
  m.t_90 = rel(settle_time(time, e_kin, m.threshold_90));
  double sum = 0.0;
  // Small slack so samples assembled from many steps still land on the edges.
  const double eps = 1e-9;
  for (std::size_t i = 0; i < time.size(); ++i) {
    if (time[i] >= window_lo - eps && time[i] <= window_hi + eps) {
      sum += e_kin[i];
      ++m.window_samples;
    }
  }
  if (m.window_samples == 0) throw ConfigError("compute_metrics: no samples in the mean window");
  m.mean_window = sum / static_cast<double>(m.window_samples);
  return m;
}

}  // namespace dmpm

// Bias-corrected Adam.
#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "dmpm/core/errors.hpp"

namespace dmpm {

struct AdamParams {
  double lr = 0.02;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  AdamParams params;
  std::vector<double> m;
  std::vector<double> v;
  long step = 0;

  AdamState() = default;
  AdamState(std::size_t n, AdamParams p) : params(p), m(n, 0.0), v(n, 0.0) {}
};

/// One Adam update of theta in place.
inline void adam_step(std::span<double> theta, std::span<const double> g, AdamState& st) {
  if (theta.size() != g.size() || st.m.size() != g.size() || st.v.size() != g.size())
    throw ConfigError("adam_step: dimension mismatch");
  const AdamParams& p = st.params;
  ++st.step;
  const double c1 = 1.0 - std::pow(p.beta1, static_cast<double>(st.step));
  const double c2 = 1.0 - std::pow(p.beta2, static_cast<double>(st.step));
  for (std::size_t i = 0; i < g.size(); ++i) {
    st.m[i] = p.beta1 * st.m[i] + (1.0 - p.beta1) * g[i];
    st.v[i] = p.beta2 * st.v[i] + (1.0 - p.beta2) * g[i] * g[i];
    const double mhat = st.m[i] / c1;
    const double vhat = st.v[i] / c2;
    theta[i] -= p.lr * mhat / (std::sqrt(vhat) + p.eps);
  }
}

}  // namespace dmpm

#pragma once

#include <cstddef>
#include <vector>

#include "dmpm/core/dual.hpp"
#include "dmpm/core/linalg.hpp"

namespace dmpm {

/// Lagrangian particle state. Position, velocity and deformation gradient
/// form the integrated state; mass and reference volume are constants.
template <typename T>
struct ParticleSet {
  std::vector<Vec2<T>> x;
  std::vector<Vec2<T>> v;
  std::vector<Mat2<T>> F;
  std::vector<double> mass;
  std::vector<double> volume0;

  std::size_t size() const { return x.size(); }
  bool empty() const { return x.empty(); }

  void add(const Vec2<T>& position, const Vec2<T>& velocity, double m, double vol0) {
    x.push_back(position);
    v.push_back(velocity);
    F.push_back(Mat2<T>::Identity());
    mass.push_back(m);
    volume0.push_back(vol0);
  }

  double total_mass() const {
    double s = 0.0;
    for (double m : mass) s += m;
    return s;
  }
};

/// Time derivative of the integrated particle state.
template <typename T>
struct StateDerivative {
  std::vector<Vec2<T>> xdot;
  std::vector<Vec2<T>> vdot;
  std::vector<Mat2<T>> Fdot;

  void resize(std::size_t n) {
    xdot.resize(n);
    vdot.resize(n);
    Fdot.resize(n);
  }
  std::size_t size() const { return xdot.size(); }
};

/// out = base + scale * deriv, for the integrated fields; constants copied.
template <typename T>
void axpy_state(const ParticleSet<T>& base, double scale, const StateDerivative<T>& deriv,
                ParticleSet<T>& out) {
  const std::size_t n = base.size();
  if (&out != &base) {
    out.x.resize(n);
    out.v.resize(n);
    out.F.resize(n);
    out.mass = base.mass;
    out.volume0 = base.volume0;
  }
  for (std::size_t p = 0; p < n; ++p) {
    out.x[p] = base.x[p] + scale * deriv.xdot[p];
    out.v[p] = base.v[p] + scale * deriv.vdot[p];
    out.F[p] = base.F[p] + scale * deriv.Fdot[p];
  }
}

/// Lifts a double-valued state into another scalar type with zero tangents.
template <typename T>
ParticleSet<T> lift_state(const ParticleSet<double>& s) {
  ParticleSet<T> out;
  const std::size_t n = s.size();
  out.x.reserve(n);
  out.v.reserve(n);
  out.F.reserve(n);
  for (std::size_t p = 0; p < n; ++p) {
    out.x.emplace_back(T(s.x[p].x), T(s.x[p].y));
    out.v.emplace_back(T(s.v[p].x), T(s.v[p].y));
    out.F.emplace_back(T(s.F[p].xx), T(s.F[p].xy), T(s.F[p].yx), T(s.F[p].yy));
  }
  out.mass = s.mass;
  out.volume0 = s.volume0;
  return out;
}

/// Drops tangents, keeping primal values.
template <typename T>
ParticleSet<double> primal_state(const ParticleSet<T>& s) {
  if constexpr (std::is_same_v<T, double>) {
    return s;
  } else {
    ParticleSet<double> out;
    const std::size_t n = s.size();
    out.x.reserve(n);
    out.v.reserve(n);
    out.F.reserve(n);
    for (std::size_t p = 0; p < n; ++p) {
      out.x.emplace_back(value(s.x[p].x), value(s.x[p].y));
      out.v.emplace_back(value(s.v[p].x), value(s.v[p].y));
      out.F.emplace_back(value(s.F[p].xx), value(s.F[p].xy), value(s.F[p].yx),
                         value(s.F[p].yy));
    }
    out.mass = s.mass;
    out.volume0 = s.volume0;
    return out;
  }
}

}  // namespace dmpm

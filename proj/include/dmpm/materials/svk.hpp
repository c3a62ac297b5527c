// Saint Venant-Kirchhoff hyperelasticity with strain-rate dissipation.
#pragma once

#include <cmath>
#include <sstream>

#include "dmpm/core/dual.hpp"
#include "dmpm/core/errors.hpp"
#include "dmpm/core/linalg.hpp"
#include "dmpm/mpm/particles.hpp"

namespace dmpm {

struct LameParameters {
  double lambda = 0.0;
  double mu = 0.0;
};

/// Plane-strain / 3D conversion from Young's modulus and Poisson ratio.
inline LameParameters lame_from_young_poisson(double E, double nu) {
  if (!(E > 0.0)) throw ConfigError("Young's modulus must be positive");
  if (!(nu < 0.5)) throw ConfigError("Poisson ratio must be below 0.5 (incompressible limit)");
  if (!(nu >= 0.0)) throw ConfigError("Poisson ratio must be non-negative");
  return {E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)), E / (2.0 * (1.0 + nu))};
}

struct MaterialParams {
  double youngs_modulus = 0.0;
  double poisson_ratio = 0.0;
  double lambda = 0.0;
  double mu = 0.0;
  double lambda_d = 0.0;  // Pa s
  double mu_d = 0.0;      // Pa s
  double density = 0.0;   // kg/m^3

  static MaterialParams FromYoungPoisson(double E, double nu, double rho0, double lambda_d = 0.0,
                                         double mu_d = 0.0) {
    const LameParameters lame = lame_from_young_poisson(E, nu);
    MaterialParams m;
    m.youngs_modulus = E;
    m.poisson_ratio = nu;
    m.lambda = lame.lambda;
    m.mu = lame.mu;
    m.lambda_d = lambda_d;
    m.mu_d = mu_d;
    m.density = rho0;
    m.validate();
    return m;
  }

  void validate() const {
    if (!(mu > 0.0)) throw ConfigError("shear modulus mu must be positive");
    if (!(lambda > -mu)) throw ConfigError("lambda must exceed -mu");
    if (!(lambda_d >= 0.0 && mu_d >= 0.0)) throw ConfigError("damping parameters must be >= 0");
    if (!(density > 0.0)) throw ConfigError("density must be positive");
  }

  /// Dilatational wave speed sqrt((lambda + 2 mu) / rho0).
  double wave_speed() const { return std::sqrt((lambda + 2.0 * mu) / density); }
};

template <typename T>
Mat2<T> green_strain(const Mat2<T>& F) {
  Mat2<T> e = F.transpose() * F;
  e.xx -= 1.0;
  e.yy -= 1.0;
  e *= 0.5;
  // FtF is symmetric analytically; force exact symmetry in floating point.
  e.yx = e.xy;
  return e;
}

template <typename T>
Mat2<T> strain_rate(const Mat2<T>& F, const Mat2<T>& Fdot) {
  const Mat2<T> a = F.transpose() * Fdot;
  Mat2<T> r(a.xx, 0.5 * (a.xy + a.yx), T(0.0), a.yy);
  r.yx = r.xy;
  return r;
}

/// lambda tr(E) I + 2 mu E
template <typename T>
Mat2<T> isotropic_linear(const Mat2<T>& e, double lambda, double mu) {
  const T tr = lambda * e.trace();
  Mat2<T> s = (2.0 * mu) * e;
  s.xx += tr;
  s.yy += tr;
  return s;
}

/// F S F^T with symmetric S, returned exactly symmetric.
template <typename T>
Mat2<T> push_forward(const Mat2<T>& F, const Mat2<T>& S) {
  Mat2<T> s = F * S * F.transpose();
  s.yx = s.xy;
  return s;
}

template <typename T>
void check_not_inverted(const Mat2<T>& F) {
  const double J = value(F.determinant());
  if (!(J > 0.0)) {
    std::ostringstream msg;
    msg << "deformation gradient inverted (det F = " << J << ")";
    throw SimulationError(SimulationError::Kind::kInversion, msg.str());
  }
}

/// Elastic plus dissipative Cauchy stress (Pa).
template <typename T>
Mat2<T> total_stress(const Mat2<T>& F, const Mat2<T>& Fdot, const MaterialParams& mat) {
  check_not_inverted(F);
  Mat2<T> S = isotropic_linear(green_strain(F), mat.lambda, mat.mu);
  if (mat.lambda_d != 0.0 || mat.mu_d != 0.0) {
    S += isotropic_linear(strain_rate(F, Fdot), mat.lambda_d, mat.mu_d);
  }
  return push_forward(F, S);
}

/// SVK energy density psi(E) = lambda/2 tr(E)^2 + mu E:E (J/m^3).
inline double strain_energy_density(const Mat2d& e, const MaterialParams& mat) {
  const double tr = e.trace();
  return 0.5 * mat.lambda * tr * tr + mat.mu * ddot(e, e);
}

struct Energies {
  double kinetic = 0.0;
  double strain = 0.0;
  double total = 0.0;
};

inline double kinetic_energy(const ParticleSet<double>& s) {
  double ek = 0.0;
  for (std::size_t p = 0; p < s.size(); ++p) ek += 0.5 * s.mass[p] * squared_norm(s.v[p]);
  return ek;
}

inline Energies energies(const ParticleSet<double>& s, const MaterialParams& mat) {
  Energies e;
  e.kinetic = kinetic_energy(s);
  for (std::size_t p = 0; p < s.size(); ++p) {
    e.strain += s.volume0[p] * strain_energy_density(green_strain(s.F[p]), mat);
  }
  e.total = e.kinetic + e.strain;
  return e;
}

}  // namespace dmpm

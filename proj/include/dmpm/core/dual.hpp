// Forward-mode dual numbers carrying a fixed number of tangent directions.
//
// A Dual<N> holds a value and N partial derivatives. Seeding the N control
// values of a window with unit tangents and running the ordinary simulation
// templated on Dual<N> yields the exact gradient of every output with
// respect to those controls in a single pass.
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <type_traits>

namespace dmpm {

template <std::size_t N>
struct Dual {
  static constexpr std::size_t kTangents = N;

  double v = 0.0;
  std::array<double, N> d{};

  constexpr Dual() = default;
  // Implicit from double: constants carry zero tangents.
  constexpr Dual(double value) : v(value) {}  // NOLINT

  static Dual Variable(double value, std::size_t direction) {
    Dual r(value);
    r.d[direction] = 1.0;
    return r;
  }

  Dual& operator+=(const Dual& o) {
    v += o.v;
    for (std::size_t i = 0; i < N; ++i) d[i] += o.d[i];
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    v -= o.v;
    for (std::size_t i = 0; i < N; ++i) d[i] -= o.d[i];
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    for (std::size_t i = 0; i < N; ++i) d[i] = d[i] * o.v + v * o.d[i];
    v *= o.v;
    return *this;
  }
  Dual& operator/=(const Dual& o) {
    // Value divided exactly as in double arithmetic, so primal results
    // match a plain double run bit for bit.
    const double q = v / o.v;
    for (std::size_t i = 0; i < N; ++i) d[i] = (d[i] - q * o.d[i]) / o.v;
    v = q;
    return *this;
  }
  Dual& operator+=(double s) {
    v += s;
    return *this;
  }
  Dual& operator-=(double s) {
    v -= s;
    return *this;
  }
  Dual& operator*=(double s) {
    v *= s;
    for (std::size_t i = 0; i < N; ++i) d[i] *= s;
    return *this;
  }
  Dual& operator/=(double s) {
    v /= s;
    for (std::size_t i = 0; i < N; ++i) d[i] /= s;
    return *this;
  }
};

template <std::size_t N>
Dual<N> operator-(Dual<N> a) {
  a.v = -a.v;
  for (std::size_t i = 0; i < N; ++i) a.d[i] = -a.d[i];
  return a;
}

template <std::size_t N>
Dual<N> operator+(Dual<N> a, const Dual<N>& b) { return a += b; }
template <std::size_t N>
Dual<N> operator-(Dual<N> a, const Dual<N>& b) { return a -= b; }
template <std::size_t N>
Dual<N> operator*(Dual<N> a, const Dual<N>& b) { return a *= b; }
template <std::size_t N>
Dual<N> operator/(Dual<N> a, const Dual<N>& b) { return a /= b; }

template <std::size_t N>
Dual<N> operator+(Dual<N> a, double s) { return a += s; }
template <std::size_t N>
Dual<N> operator+(double s, Dual<N> a) { return a += s; }
template <std::size_t N>
Dual<N> operator-(Dual<N> a, double s) { return a -= s; }
template <std::size_t N>
Dual<N> operator-(double s, const Dual<N>& a) { return -a + s; }
template <std::size_t N>
Dual<N> operator*(Dual<N> a, double s) { return a *= s; }
template <std::size_t N>
Dual<N> operator*(double s, Dual<N> a) { return a *= s; }
template <std::size_t N>
Dual<N> operator/(Dual<N> a, double s) { return a /= s; }
template <std::size_t N>
Dual<N> operator/(double s, const Dual<N>& a) { return Dual<N>(s) / a; }

template <std::size_t N>
Dual<N> sqrt(const Dual<N>& a) {
  Dual<N> r(std::sqrt(a.v));
  const double scale = 0.5 / r.v;
  for (std::size_t i = 0; i < N; ++i) r.d[i] = a.d[i] * scale;
  return r;
}

template <typename T>
struct is_dual : std::false_type {};
template <std::size_t N>
struct is_dual<Dual<N>> : std::true_type {};
template <typename T>
inline constexpr bool is_dual_v = is_dual<T>::value;

/// Primal value of a scalar; branches and index computations use this.
inline constexpr double value(double x) { return x; }
template <std::size_t N>
constexpr double value(const Dual<N>& x) { return x.v; }

}  // namespace dmpm

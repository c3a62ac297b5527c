// Small fixed-size 2D vector/matrix types templated on the scalar, so the
// same kernels run on double and on forward-mode dual numbers.
#pragma once

#include <cmath>
#include <ostream>
#include <type_traits>
#include <utility>

namespace dmpm {

template <typename T>
struct Vec2 {
  T x{};
  T y{};

  constexpr Vec2() = default;
  constexpr Vec2(T x_, T y_) : x(std::move(x_)), y(std::move(y_)) {}

  template <typename U>
  explicit constexpr Vec2(const Vec2<U>& o) : x(T(o.x)), y(T(o.y)) {}

  static constexpr Vec2 Zero() { return Vec2(T(0.0), T(0.0)); }

  T& operator[](int i) { return i == 0 ? x : y; }
  const T& operator[](int i) const { return i == 0 ? x : y; }

  Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  Vec2& operator-=(const Vec2& o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  template <typename S>
  Vec2& operator*=(const S& s) {
    x *= s;
    y *= s;
    return *this;
  }
};

template <typename T>
Vec2<T> operator+(Vec2<T> a, const Vec2<T>& b) { return a += b; }
template <typename T>
Vec2<T> operator-(Vec2<T> a, const Vec2<T>& b) { return a -= b; }
template <typename T>
Vec2<T> operator-(const Vec2<T>& a) { return Vec2<T>(-a.x, -a.y); }
template <typename T>
Vec2<T> operator*(const T& s, const Vec2<T>& a) { return Vec2<T>(s * a.x, s * a.y); }
template <typename T>
Vec2<T> operator*(const Vec2<T>& a, const T& s) { return Vec2<T>(a.x * s, a.y * s); }
template <typename T>
  requires(!std::is_same_v<T, double>)
Vec2<T> operator*(double s, const Vec2<T>& a) { return Vec2<T>(s * a.x, s * a.y); }
template <typename T>
Vec2<T> operator/(const Vec2<T>& a, const T& s) { return Vec2<T>(a.x / s, a.y / s); }

template <typename T>
T dot(const Vec2<T>& a, const Vec2<T>& b) { return a.x * b.x + a.y * b.y; }

template <typename T>
T squared_norm(const Vec2<T>& a) { return a.x * a.x + a.y * a.y; }

/// Row-major 2x2 matrix.
template <typename T>
struct Mat2 {
  T xx{}, xy{};
  T yx{}, yy{};

  constexpr Mat2() = default;
  constexpr Mat2(T a, T b, T c, T d)
      : xx(std::move(a)), xy(std::move(b)), yx(std::move(c)), yy(std::move(d)) {}

  template <typename U>
  explicit constexpr Mat2(const Mat2<U>& o)
      : xx(T(o.xx)), xy(T(o.xy)), yx(T(o.yx)), yy(T(o.yy)) {}

  static constexpr Mat2 Identity() { return Mat2(T(1.0), T(0.0), T(0.0), T(1.0)); }
  static constexpr Mat2 Zero() { return Mat2(T(0.0), T(0.0), T(0.0), T(0.0)); }
  static constexpr Mat2 Diagonal(T a, T d) { return Mat2(a, T(0.0), T(0.0), d); }

  T& operator()(int r, int c) { return r == 0 ? (c == 0 ? xx : xy) : (c == 0 ? yx : yy); }
  const T& operator()(int r, int c) const {
    return r == 0 ? (c == 0 ? xx : xy) : (c == 0 ? yx : yy);
  }

  Mat2 transpose() const { return Mat2(xx, yx, xy, yy); }
  T trace() const { return xx + yy; }
  T determinant() const { return xx * yy - xy * yx; }

  Mat2& operator+=(const Mat2& o) {
    xx += o.xx;
    xy += o.xy;
    yx += o.yx;
    yy += o.yy;
    return *this;
  }
  Mat2& operator-=(const Mat2& o) {
    xx -= o.xx;
    xy -= o.xy;
    yx -= o.yx;
    yy -= o.yy;
    return *this;
  }
  template <typename S>
  Mat2& operator*=(const S& s) {
    xx *= s;
    xy *= s;
    yx *= s;
    yy *= s;
    return *this;
  }
};

template <typename T>
Mat2<T> operator+(Mat2<T> a, const Mat2<T>& b) { return a += b; }
template <typename T>
Mat2<T> operator-(Mat2<T> a, const Mat2<T>& b) { return a -= b; }
template <typename T>
Mat2<T> operator*(const T& s, Mat2<T> a) { return a *= s; }
template <typename T>
  requires(!std::is_same_v<T, double>)
Mat2<T> operator*(double s, Mat2<T> a) { return a *= s; }

template <typename T>
Mat2<T> operator*(const Mat2<T>& a, const Mat2<T>& b) {
  return Mat2<T>(a.xx * b.xx + a.xy * b.yx, a.xx * b.xy + a.xy * b.yy,
                 a.yx * b.xx + a.yy * b.yx, a.yx * b.xy + a.yy * b.yy);
}

template <typename T>
Vec2<T> operator*(const Mat2<T>& a, const Vec2<T>& v) {
  return Vec2<T>(a.xx * v.x + a.xy * v.y, a.yx * v.x + a.yy * v.y);
}

/// a b^T
template <typename T>
Mat2<T> outer(const Vec2<T>& a, const Vec2<T>& b) {
  return Mat2<T>(a.x * b.x, a.x * b.y, a.y * b.x, a.y * b.y);
}

/// Frobenius inner product A:B.
template <typename T>
T ddot(const Mat2<T>& a, const Mat2<T>& b) {
  return a.xx * b.xx + a.xy * b.xy + a.yx * b.yx + a.yy * b.yy;
}

using Vec2d = Vec2<double>;
using Mat2d = Mat2<double>;

inline std::ostream& operator<<(std::ostream& os, const Vec2d& v) {
  return os << "(" << v.x << ", " << v.y << ")";
}

inline std::ostream& operator<<(std::ostream& os, const Mat2d& m) {
  return os << "[[" << m.xx << ", " << m.xy << "], [" << m.yx << ", " << m.yy << "]]";
}

}  // namespace dmpm

#pragma once

// Forward-mode dual numbers and a complex-over-T wrapper.
//
// Coframe fields are evaluated generically over a scalar type T so that the
// same code path yields values (T = double) and exact first derivatives
// (T = Dual). Dual carries up to kMaxVars partials; chart dimensions in this
// project never exceed 7 (sphere n = 3).

#include <array>
#include <cmath>
#include <cstddef>

namespace crlab {

inline constexpr std::size_t kMaxVars = 7;

struct Dual {
  double v = 0.0;
  std::array<double, kMaxVars> d{};  // zero-initialized

  Dual() = default;
  Dual(double value) : v(value) {}
  static Dual var(double value, std::size_t slot) {
    Dual x(value);
    x.d[slot] = 1.0;
    return x;
  }
};

inline Dual operator+(const Dual& a, const Dual& b) {
  Dual r(a.v + b.v);
  for (std::size_t i = 0; i < kMaxVars; ++i) r.d[i] = a.d[i] + b.d[i];
  return r;
}
inline Dual operator-(const Dual& a, const Dual& b) {
  Dual r(a.v - b.v);
  for (std::size_t i = 0; i < kMaxVars; ++i) r.d[i] = a.d[i] - b.d[i];
  return r;
}
inline Dual operator-(const Dual& a) {
  Dual r(-a.v);
  for (std::size_t i = 0; i < kMaxVars; ++i) r.d[i] = -a.d[i];
  return r;
}
inline Dual operator*(const Dual& a, const Dual& b) {
  Dual r(a.v * b.v);
  for (std::size_t i = 0; i < kMaxVars; ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i];
  return r;
}
inline Dual operator/(const Dual& a, const Dual& b) {
  Dual r(a.v / b.v);
  const double ib2 = 1.0 / (b.v * b.v);
  for (std::size_t i = 0; i < kMaxVars; ++i) r.d[i] = (a.d[i] * b.v - a.v * b.d[i]) * ib2;
  return r;
}
inline Dual& operator+=(Dual& a, const Dual& b) { a = a + b; return a; }
inline Dual& operator-=(Dual& a, const Dual& b) { a = a - b; return a; }
inline Dual& operator*=(Dual& a, const Dual& b) { a = a * b; return a; }
inline Dual& operator/=(Dual& a, const Dual& b) { a = a / b; return a; }

inline bool operator<(const Dual& a, const Dual& b) { return a.v < b.v; }
inline bool operator>(const Dual& a, const Dual& b) { return a.v > b.v; }

inline Dual sqrt(const Dual& a) {
  Dual r(std::sqrt(a.v));
  const double s = 0.5 / r.v;
  for (std::size_t i = 0; i < kMaxVars; ++i) r.d[i] = s * a.d[i];
  return r;
}
inline Dual sin(const Dual& a) {
  Dual r(std::sin(a.v));
  const double c = std::cos(a.v);
  for (std::size_t i = 0; i < kMaxVars; ++i) r.d[i] = c * a.d[i];
  return r;
}
inline Dual cos(const Dual& a) {
  Dual r(std::cos(a.v));
  const double s = -std::sin(a.v);
  for (std::size_t i = 0; i < kMaxVars; ++i) r.d[i] = s * a.d[i];
  return r;
}
// Derivative of atan2(y, x): (x dy - y dx) / (x^2 + y^2).
inline Dual atan2(const Dual& y, const Dual& x) {
  Dual r(std::atan2(y.v, x.v));
  const double q = 1.0 / (x.v * x.v + y.v * y.v);
  for (std::size_t i = 0; i < kMaxVars; ++i) r.d[i] = (x.v * y.d[i] - y.v * x.d[i]) * q;
  return r;
}

inline double value(double x) { return x; }
inline double value(const Dual& x) { return x.v; }
inline double partial(double, std::size_t) { return 0.0; }
inline double partial(const Dual& x, std::size_t i) { return x.d[i]; }

// using-declarations so unqualified calls resolve for double too
using std::sqrt;
using std::sin;
using std::cos;
using std::atan2;

// Minimal complex type over a generic real scalar T.
template <class T>
struct cx {
  T re{}, im{};
  cx() = default;
  cx(T r) : re(r) {}
  cx(T r, T i) : re(r), im(i) {}
};

template <class T> cx<T> operator+(const cx<T>& a, const cx<T>& b) { return {a.re + b.re, a.im + b.im}; }
template <class T> cx<T> operator-(const cx<T>& a, const cx<T>& b) { return {a.re - b.re, a.im - b.im}; }
template <class T> cx<T> operator-(const cx<T>& a) { return {-a.re, -a.im}; }
template <class T> cx<T> operator*(const cx<T>& a, const cx<T>& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
template <class T> cx<T> operator*(const T& s, const cx<T>& a) { return {s * a.re, s * a.im}; }
template <class T> cx<T> operator*(const cx<T>& a, const T& s) { return {a.re * s, a.im * s}; }
template <class T> cx<T> operator/(const cx<T>& a, const cx<T>& b) {
  T n = b.re * b.re + b.im * b.im;
  return {(a.re * b.re + a.im * b.im) / n, (a.im * b.re - a.re * b.im) / n};
}
template <class T> cx<T> operator/(const cx<T>& a, const T& s) { return {a.re / s, a.im / s}; }
template <class T> cx<T>& operator+=(cx<T>& a, const cx<T>& b) { a = a + b; return a; }
template <class T> cx<T>& operator-=(cx<T>& a, const cx<T>& b) { a = a - b; return a; }
template <class T> cx<T>& operator*=(cx<T>& a, const cx<T>& b) { a = a * b; return a; }

template <class T> cx<T> conj(const cx<T>& a) { return {a.re, -a.im}; }
template <class T> T norm2(const cx<T>& a) { return a.re * a.re + a.im * a.im; }
template <class T> cx<T> iu(const cx<T>& a) { return {-a.im, a.re}; }  // multiply by i

// |.| of the value part, for pivoting
template <class T> double cx_mag(const cx<T>& a) {
  double r = value(a.re), i = value(a.im);
  return std::abs(r) + std::abs(i);
}

}  // namespace crlab

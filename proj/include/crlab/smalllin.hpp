#pragma once

// Small dense complex linear algebra over a generic scalar (double or Dual).
// Fixed capacity avoids allocation inside hot evaluation paths; dimensions in
// this project are at most 2n+2 <= 8.

#include <cassert>
#include <stdexcept>

#include "crlab/scalars.hpp"

namespace crlab {

inline constexpr std::size_t kMaxDim = 8;

template <class T>
struct CMat {
  std::size_t rows = 0, cols = 0;
  std::array<cx<T>, kMaxDim * kMaxDim> a{};

  CMat() = default;
  CMat(std::size_t r, std::size_t c) : rows(r), cols(c) { assert(r <= kMaxDim && c <= kMaxDim); }
  cx<T>& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  const cx<T>& operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

  static CMat identity(std::size_t n) {
    CMat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = cx<T>(T(1.0));
    return m;
  }
};

template <class T>
CMat<T> operator*(const CMat<T>& x, const CMat<T>& y) {
  assert(x.cols == y.rows);
  CMat<T> r(x.rows, y.cols);
  for (std::size_t i = 0; i < x.rows; ++i)
    for (std::size_t k = 0; k < x.cols; ++k) {
      const cx<T>& xik = x(i, k);
      for (std::size_t j = 0; j < y.cols; ++j) r(i, j) += xik * y(k, j);
    }
  return r;
}

template <class T>
CMat<T> operator+(const CMat<T>& x, const CMat<T>& y) {
  CMat<T> r(x.rows, x.cols);
  for (std::size_t i = 0; i < x.rows * x.cols; ++i) r.a[i] = x.a[i] + y.a[i];
  return r;
}

template <class T>
CMat<T> operator-(const CMat<T>& x, const CMat<T>& y) {
  CMat<T> r(x.rows, x.cols);
  for (std::size_t i = 0; i < x.rows * x.cols; ++i) r.a[i] = x.a[i] - y.a[i];
  return r;
}

template <class T>
CMat<T> scale(const CMat<T>& x, const cx<T>& s) {
  CMat<T> r(x.rows, x.cols);
  for (std::size_t i = 0; i < x.rows * x.cols; ++i) r.a[i] = x.a[i] * s;
  return r;
}

// Gauss-Jordan inverse with partial pivoting on |value|.
template <class T>
CMat<T> inverse(CMat<T> m) {
  assert(m.rows == m.cols);
  const std::size_t n = m.rows;
  CMat<T> inv = CMat<T>::identity(n);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    double best = cx_mag(m(col, col));
    for (std::size_t r = col + 1; r < n; ++r) {
      double mag = cx_mag(m(r, col));
      if (mag > best) { best = mag; piv = r; }
    }
    if (best < 1e-300) throw std::runtime_error("singular matrix in crlab::inverse");
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(m(col, j), m(piv, j));
        std::swap(inv(col, j), inv(piv, j));
      }
    }
    cx<T> p = m(col, col);
    for (std::size_t j = 0; j < n; ++j) {
      m(col, j) = m(col, j) / p;
      inv(col, j) = inv(col, j) / p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      // no zero-value skip: for Dual scalars the derivative part can be
      // nonzero even when the value vanishes
      cx<T> f = m(r, col);
      for (std::size_t j = 0; j < n; ++j) {
        m(r, j) -= f * m(col, j);
        inv(r, j) -= f * inv(col, j);
      }
    }
  }
  return inv;
}

// Principal square root of a hermitian positive-definite matrix.
// n = 1, 2 use closed forms; larger n fall back to a Denman-Beavers iteration
// (rational in the entries, hence AD-transparent).
template <class T>
CMat<T> herm_sqrt(const CMat<T>& h) {
  assert(h.rows == h.cols);
  const std::size_t n = h.rows;
  if (n == 1) {
    if (value(h(0, 0).re) <= 0.0) throw std::runtime_error("herm_sqrt: not positive definite");
    CMat<T> r(1, 1);
    r(0, 0) = cx<T>(sqrt(h(0, 0).re));
    return r;
  }
  if (n == 2) {
    // sqrt(H) = (H + sqrt(det) I) / sqrt(tr + 2 sqrt(det))
    T det = (h(0, 0) * h(1, 1) - h(0, 1) * h(1, 0)).re;
    T tr = h(0, 0).re + h(1, 1).re;
    if (value(det) <= 0.0 || value(tr) <= 0.0)
      throw std::runtime_error("herm_sqrt: not positive definite");
    T sd = sqrt(det);
    T denom = sqrt(tr + T(2.0) * sd);
    CMat<T> r = h;
    r(0, 0).re += sd;
    r(1, 1).re += sd;
    for (std::size_t i = 0; i < 4; ++i) r.a[i] = r.a[i] / denom;
    return r;
  }
  CMat<T> y = h, z = CMat<T>::identity(n);
  for (int it = 0; it < 60; ++it) {
    CMat<T> yi = inverse(y), zi = inverse(z);
    CMat<T> yn = scale(y + zi, cx<T>(T(0.5)));
    CMat<T> zn = scale(z + yi, cx<T>(T(0.5)));
    double delta = 0.0;
    for (std::size_t i = 0; i < n * n; ++i) delta += cx_mag(yn.a[i] - y.a[i]);
    y = yn;
    z = zn;
    if (delta < 1e-15 && it > 2) break;
  }
  // verify convergence on the value parts
  CMat<T> chk = y * y - h;
  double err = 0.0;
  for (std::size_t i = 0; i < n * n; ++i) err += cx_mag(chk.a[i]);
  if (err > 1e-10) throw std::runtime_error("herm_sqrt: iteration failed to converge");
  return y;
}

// Solve m x = b for a single right-hand side (square m).
template <class T>
void gauss_solve(CMat<T> m, std::array<cx<T>, kMaxDim>& b) {
  const std::size_t n = m.rows;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    double best = cx_mag(m(col, col));
    for (std::size_t r = col + 1; r < n; ++r) {
      double mag = cx_mag(m(r, col));
      if (mag > best) { best = mag; piv = r; }
    }
    if (best < 1e-300) throw std::runtime_error("singular matrix in crlab::gauss_solve");
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(col, j), m(piv, j));
      std::swap(b[col], b[piv]);
    }
    cx<T> p = m(col, col);
    for (std::size_t j = col; j < n; ++j) m(col, j) = m(col, j) / p;
    b[col] = b[col] / p;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      cx<T> f = m(r, col);
      for (std::size_t j = col; j < n; ++j) m(r, j) -= f * m(col, j);
      b[r] -= f * b[col];
    }
  }
}

}  // namespace crlab

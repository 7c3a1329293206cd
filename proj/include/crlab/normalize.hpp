#pragma once

// Coframe normalization: given theta, candidate (1,0) rows eta, and dtheta,
// produce admissible theta^alpha with Levi matrix = identity.
//
// Steps: invert the co-basis {theta, eta, etabar} to get the dual frame,
// decompose dtheta, shift eta by lambda*theta to kill the theta ^ etabar
// sector, then apply conj(h^{1/2}) (unique positive-definite hermitian root)
// so that dtheta = i sum theta^a ^ theta^abar exactly.
//
// Templated over the scalar so the sphere model can push dual numbers through
// it for exact coframe jets.

#include <stdexcept>

#include "crlab/model.hpp"
#include "crlab/scalars.hpp"
#include "crlab/smalllin.hpp"

namespace crlab {

template <class T>
struct NormalizedCoframe {
  CMat<T> alpha;  // n x D rows of theta^alpha
  CMat<T> levi;   // pre-normalization Levi matrix h (diagnostic)
};

template <class T>
NormalizedCoframe<T> normalize_core(int n, const std::array<T, kMaxDim>& theta_row,
                                    const CMat<T>& eta_rows,
                                    const std::array<T, kMaxDim * kMaxDim>& dth) {
  const int D = 2 * n + 1;
  // co-basis matrix B: row 0 = theta, rows 1..n = eta, rows n+1..2n = conj(eta)
  CMat<T> B(D, D);
  for (int j = 0; j < D; ++j) B(0, j) = cx<T>(theta_row[j]);
  for (int a = 0; a < n; ++a)
    for (int j = 0; j < D; ++j) {
      B(1 + a, j) = eta_rows(a, j);
      B(1 + n + a, j) = conj(eta_rows(a, j));
    }
  CMat<T> Binv = inverse(B);  // columns are the dual frame vectors

  // F(e_i, e_j) = e_i^T dth e_j over the frame columns
  auto pair_eval = [&](int i, int j) {
    cx<T> s;
    for (int k = 0; k < D; ++k) {
      cx<T> row;
      for (int l = 0; l < D; ++l) row += cx<T>(dth[k * D + l]) * Binv(l, j);
      s += Binv(k, i) * row;
    }
    return s;
  };

  // integrability: the eta ^ eta sector must vanish
  for (int m = 0; m < n; ++m)
    for (int nu = m + 1; nu < n; ++nu)
      if (cx_mag(pair_eval(1 + m, 1 + nu)) > 1e-7)
        throw std::runtime_error("normalize_core: nonzero (2,0) sector in dtheta");

  // Levi h from the eta ^ etabar sector: c_{m nbar} = i h_{m nbar}
  CMat<T> h(n, n);
  for (int m = 0; m < n; ++m)
    for (int nu = 0; nu < n; ++nu) {
      cx<T> c = pair_eval(1 + m, 1 + n + nu);
      h(m, nu) = cx<T>(c.im, T(-1.0) * c.re);  // c / i
    }
  for (int m = 0; m < n; ++m) {
    if (value(h(m, m).re) <= 0.0)
      throw std::runtime_error("normalize_core: Levi form not positive definite");
    for (int nu = 0; nu < n; ++nu)
      if (cx_mag(h(m, nu) - conj(h(nu, m))) > 1e-7)
        throw std::runtime_error("normalize_core: Levi form not hermitian");
  }

  // lambda shift kills the theta ^ etabar sector: i sum_m lambda^m h_{m nbar} = c_{theta nbar}
  std::array<cx<T>, kMaxDim> rhs{};
  for (int nu = 0; nu < n; ++nu) rhs[nu] = pair_eval(0, 1 + n + nu);
  CMat<T> iht(n, n);  // (i h)^T
  for (int m = 0; m < n; ++m)
    for (int nu = 0; nu < n; ++nu) iht(nu, m) = iu(h(m, nu));
  gauss_solve(iht, rhs);  // rhs now holds lambda

  CMat<T> shifted(n, D);
  for (int a = 0; a < n; ++a)
    for (int j = 0; j < D; ++j) shifted(a, j) = eta_rows(a, j) + rhs[a] * cx<T>(theta_row[j]);

  // theta^alpha = conj(h^{1/2}) * shifted  (then Levi = identity)
  CMat<T> M = herm_sqrt(h);
  for (std::size_t i = 0; i < M.rows * M.cols; ++i) M.a[i] = conj(M.a[i]);

  NormalizedCoframe<T> out;
  out.alpha = CMat<T>(n, D);
  for (int a = 0; a < n; ++a)
    for (int j = 0; j < D; ++j) {
      cx<T> s;
      for (int b = 0; b < n; ++b) s += M(a, b) * shifted(b, j);
      out.alpha(a, j) = s;
    }
  out.levi = h;
  return out;
}

// Double-precision wrapper for standalone use: takes theta, eta rows and the
// dtheta coefficient matrix, returns the admissible coframe.
CoframeEval normalize_coframe(const Eigen::VectorXd& theta, const Eigen::MatrixXcd& eta,
                              const Eigen::MatrixXd& dtheta);

}  // namespace crlab

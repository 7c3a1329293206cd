#pragma once

// Pointwise solve of the Webster structure equations
//   d theta^b = theta^a ^ omega_a^b + theta ^ tau^b,   tau^b = A^b_{mbar} theta^mbar,
// subject to skew-hermiticity omega_{ab bar} + conj(omega_{ba bar}) = 0,
// plus the generic numerical exterior derivative used across the project.

#include "crlab/geometry.hpp"
#include "crlab/model.hpp"

namespace crlab {

struct ConnectionEval {
  // omega_a^b expanded against {theta, theta^m, theta^mbar}:
  // omega_T(a,b) = omega_a^b(T), omega_H[m](a,b) = omega_a^b(L_m),
  // omega_Hb[m](a,b) = omega_a^b(Lbar_m).
  Eigen::MatrixXcd omega_T;
  std::vector<Eigen::MatrixXcd> omega_H;
  std::vector<Eigen::MatrixXcd> omega_Hb;
  Eigen::MatrixXcd A;  // A(b,m) = A^b_{mbar}

  double residual = 0.0;    // max reconstruction error of d theta^b (all sectors)
  double ls_residual = 0.0; // least-squares system residual
  double sigma_min = 0.0;   // smallest singular value of the (constant) system

  // chart-coordinate rows
  Eigen::VectorXcd omega_row(const CoframeEval& cf, int a, int b) const;
  Eigen::VectorXcd tau_row(const CoframeEval& cf, int b) const;
  // value on a tangent vector expressed by (theta(v), theta^m(v)): cheap path
  Cd omega_on(int a, int b, Cd thv, const Eigen::VectorXcd& av) const;
  Cd tau_on(int b, const Eigen::VectorXcd& av) const;
};

// Least-squares solve; the coefficient matrix depends only on n and is
// factorized once per n. Throws on rank deficiency.
ConnectionEval solve_connection(const ModelManifold& m, const ChartPoint& p);

// Same from a precomputed jet (used by decorated/FD paths).
ConnectionEval solve_connection_from_jet(const CoframeJet& j);

// Numerical exterior derivative of a form field at p; input degree 1 or 2.
// order selects the 2nd- or 4th-order central stencil.
FormEval exterior_derivative(const std::function<FormEval(const ChartPoint&)>& field,
                             const ChartPoint& p, double step = 1e-5, int order = 2);

}  // namespace crlab

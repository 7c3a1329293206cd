#pragma once

// Webster curvature from finite differences of the pointwise connection
// solve, and the Chern-Moser tensors D, E built on top of it.
//
// The curvature 2-form is expanded as
//   d omega_a^b - omega_a^g ^ omega_g^b
//     = R_a^b_{m nbar} theta^m ^ theta^nbar
//       + W_a^b_m theta^m ^ theta - W^b_{a nbar} theta^nbar ^ theta
//       + i theta_a ^ tau^b - tau_a ^ theta^b
// and the Ricci tensor is the first-pair contraction R_{m nbar} = R_a^a_{m nbar}.

#include "crlab/connection.hpp"

namespace crlab {

struct CurvatureEval {
  int n = 0;
  std::vector<Eigen::MatrixXcd> blocks; // blocks[a*n+b](m,v) = R_a^b_{m vbar}
  std::vector<Eigen::VectorXcd> W1;     // W1[a*n+b](m) = W_a^b_m
  std::vector<Eigen::VectorXcd> W2;     // W2[a*n+b](v) = W^b_{a vbar}
  Eigen::MatrixXcd ricci;               // ricci(m,v) = R_{m vbar}
  double scalar = 0.0;                  // R = g^{m vbar} R_{m vbar}
  double expansion_residual = 0.0;      // unexplained sectors of the 2-form

  const Eigen::MatrixXcd& R(int a, int b) const { return blocks[a * n + b]; }
};

// Curvature at p; the connection field is differentiated with a central
// stencil of the given order (2 or 4) and step.
CurvatureEval curvature(const ModelManifold& m, const ChartPoint& p,
                        double step = 1e-3, int order = 4);

// Ricci and scalar curvature only, via the trace form d omega_a^a
// (cheaper than the full tensor; same stencil parameters).
void ricci_scalar(const ModelManifold& m, const ChartPoint& p,
                  Eigen::MatrixXcd& ricci, double& scalar,
                  double step = 1e-3, int order = 4);

// Frobenius norm of Ric - (R/n) g, the trace-free part of the Ricci tensor.
double pseudo_einstein_residual(const CurvatureEval& cv);

// Chart row of the real 1-form i omega_a^a - (R/n) theta; closed exactly
// when the structure is pseudo-Einstein (and torsion terms vanish).
Eigen::VectorXd pe_form_row(const ModelManifold& m, const ChartPoint& p,
                            double step = 1e-3, int order = 4);

// Integral of that form around the rectangle of side `side` centered at p
// in the chart plane spanned by the orthonormal pair (u, v).
double closedness_defect(const ModelManifold& m, const ChartPoint& p,
                         const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                         double side, int nodes_per_edge = 50);

// Same over an arbitrary closed polygonal loop of chart points.
double closedness_defect(const ModelManifold& m,
                         const std::vector<ChartPoint>& loop,
                         int nodes_per_edge = 50);

struct ChernMoserEval {
  int n = 0;
  Eigen::MatrixXcd D;     // D(b,a) = D_b^a = i/(n+2) (R_b^a - R/(2(n+1)) delta); -iD hermitian
  Eigen::VectorXcd E;     // E^a = 2i/(2n+1) (div_A - div_D)
  Eigen::VectorXcd div_A; // A^{am}_{;m}
  Eigen::VectorXcd div_D; // D^{mbar a}_{;mbar}
  Eigen::MatrixXcd ricci;
  double scalar = 0.0;
  // chart rows of the forms phi_b^a = omega_b^a + D_b^a theta and
  // phi^a = tau^a + D_m^a theta^m + E^a theta
  std::vector<Eigen::VectorXcd> phi_matrix;  // [b*n+a]
  std::vector<Eigen::VectorXcd> phi_vector;  // [a]
};

// D and E at p. `order` controls the stencils for Ricci and the A-gradient;
// the divergence of D always uses an order-2 outer difference of the D field.
ChernMoserEval chern_moser(const ModelManifold& m, const ChartPoint& p,
                           double step = 1e-3, int order = 4);

}  // namespace crlab

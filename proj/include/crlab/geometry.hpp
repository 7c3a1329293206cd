#pragma once

// Pointwise exterior algebra against a chart co-basis, quadrature over
// polygonal loops, and small geometric fitting utilities.

#include <Eigen/Dense>
#include <vector>

#include "crlab/model.hpp"

namespace crlab {

// A differential form at a point, coefficients in the chart co-basis.
// degree 1: f1 (row), degree 2: f2 antisymmetric matrix with
// F(u, v) = u^T f2 v, degree 3: flat antisymmetric array f3[(i*D+j)*D+k].
struct FormEval {
  int degree = 1;
  int dim = 0;
  Cd f0{};
  Eigen::VectorXcd f1;
  Eigen::MatrixXcd f2;
  std::vector<Cd> f3;
};

// alpha wedge beta for 1-form rows: c_ij = a_i b_j - a_j b_i.
Eigen::MatrixXcd wedge11(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b);

inline Cd form2_apply(const Eigen::MatrixXcd& c, const Eigen::VectorXcd& u,
                      const Eigen::VectorXcd& v) {
  return u.transpose() * c * v;
}

// Decomposition of a 2-form against the admissible co-basis
// {theta^m ^ theta^n (m<n), theta^m ^ theta^nbar, theta ^ theta^m,
//  theta ^ theta^mbar, theta^mbar ^ theta^nbar (m<n)}.
struct Sectors2 {
  Eigen::MatrixXcd hh;    // c_{mn}    = F(L_m, L_n)      (antisymmetric)
  Eigen::MatrixXcd hhbar; // c_{mnbar} = F(L_m, Lbar_n)
  Eigen::MatrixXcd hbhb;  // c_{mbnb}  = F(Lbar_m, Lbar_n) (antisymmetric)
  Eigen::VectorXcd th;    // c_{θm}    = F(T, L_m)
  Eigen::VectorXcd thbar; // c_{θmbar} = F(T, Lbar_m)
};
Sectors2 decompose2(const Eigen::MatrixXcd& f2, const FrameEval& fr);

// Rebuild the 2-form coefficient matrix from sectors and the coframe.
Eigen::MatrixXcd recompose2(const Sectors2& s, const CoframeEval& cf);

// Nodes/weights of k-point Gauss-Legendre quadrature on [0, 1].
void gauss_legendre(int k, std::vector<double>& nodes, std::vector<double>& weights);

// Integral of a real 1-form field along the closed polygon through `corners`
// (each consecutive pair is an edge, last connects back to first).
double loop_integral(const std::function<Eigen::VectorXd(const ChartPoint&)>& form_row,
                     const std::vector<ChartPoint>& corners, int nodes_per_edge);

// Rectangle of side `side` centered at p in the plane spanned by the
// orthonormal pair (u, v); returned as 4 corners.
std::vector<ChartPoint> rectangle_loop(const ChartPoint& p, const Eigen::VectorXd& u,
                                       const Eigen::VectorXd& v, double side);

// Max distance of the points from their best-fit affine 2-plane (PCA fit).
double affine_plane_deviation(const std::vector<Eigen::VectorXd>& pts);

}  // namespace crlab

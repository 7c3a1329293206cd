#pragma once

// Chain ODE in the parametrization theta(gamma-dot) = 1:
//   gamma-dot = T + 2 a^m L_m + 2 abar^m Lbar_m
//   da^a/dt   = 4i a^a |a|^2 - phi_b^a(gamma-dot) a^b - 1/2 phi^a(gamma-dot)
// with phi_b^a = omega_b^a + D_b^a theta and
//      phi^a   = tau^a + D_m^a theta^m + E^a theta.

#include "crlab/curvature.hpp"

namespace crlab {

struct ChainState {
  ChartPoint point;
  Eigen::VectorXcd a;
};

struct CurveSample {
  double t = 0.0;
  ChartPoint point;
  Eigen::VectorXcd ambient;  // empty when the model has no ambient realization
};

enum class IntegrationStatus { Completed, DomainExit, BlowUp };

struct ChainDerivative {
  Eigen::VectorXd point_dot;  // gamma-dot (real chart vector)
  Eigen::VectorXcd a_dot;
};

// cm_order: stencil order of the Chern-Moser evaluation inside the RHS.
ChainDerivative chain_rhs(const ModelManifold& m, const ChainState& s,
                          int cm_order = 2);

struct ChainTrajectory {
  std::vector<CurveSample> samples;
  std::vector<Eigen::VectorXcd> a;  // a(t) alongside samples
  IntegrationStatus status = IntegrationStatus::Completed;
};

// Fixed-step classical RK4; halts early on domain exit or ||a|| > blow_up.
ChainTrajectory integrate_chain(const ModelManifold& m, const ChainState& initial,
                                double t_span, double step,
                                double blow_up = 1e3, int cm_order = 2);

// A sampled curve with its own parameter and tangents d point / d t.
struct CurvePoint {
  double t = 0.0;
  ChartPoint point;
  Eigen::VectorXd tangent;
};

// Sup-norm defect of the chain ODE along the curve. a^m is reconstructed as
// theta^m(tangent) / (2 theta(tangent)) and differentiated in the chain
// parameter (d t_chain = theta(tangent) d t) with Lagrange stencils (up to
// 5 points).
// eval_stride > 1 checks the defect on a subsample (stencils keep the full
// resolution); the endpoints are always included.
double chain_residual(const ModelManifold& m, const std::vector<CurvePoint>& curve,
                      int cm_order = 2, int eval_stride = 1);

// Curve view of a trajectory; tangents recomputed from the chain
// parametrization (exact for the stored a).
std::vector<CurvePoint> trajectory_curve(const ModelManifold& m,
                                         const ChainTrajectory& tr);

}  // namespace crlab

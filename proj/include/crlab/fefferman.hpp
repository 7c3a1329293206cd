#pragma once

// Fefferman circle bundle C = M x S^1.
//
// Points of C are chart vectors (x^1..x^{2n+1}, t) with the fiber angle
// last; the fiber is treated as R locally. The metric
//   h = sum_a theta^a . theta^abar + 2 theta . sigma,
//   sigma = 1/(n+2) (dt + i omega_a^a - R/(2(n+1)) theta)
// is t-independent, so fiber derivatives vanish exactly in all stencils.

#include <random>

#include "crlab/chains.hpp"

namespace crlab {

struct SigmaEval {
  Eigen::VectorXd row;       // length 2n+2, last entry = dt coefficient
  Eigen::VectorXd base_row;  // the 2n+1 base columns of `row`
  double scalar_R = 0.0;
};

SigmaEval sigma(const ModelManifold& m, const ChartPoint& base,
                double step = 1e-3, int order = 4);

struct MetricEval {
  Eigen::MatrixXd h;  // (2n+2)x(2n+2), symmetric, signature (2n+1, 1)
};

// `where` may be a base chart point or a C-point (the fiber angle is ignored).
MetricEval metric(const ModelManifold& m, const Eigen::VectorXd& where,
                  double step = 1e-3, int order = 4);

struct FeffermanState {
  Eigen::VectorXd point;     // (base..., t)
  Eigen::VectorXd velocity;  // length 2n+2
};

// Null vector over the chain tangent v = T + 2 a^m L_m + c.c.: the unique
// fiber component with h(v~, v~) = 0, i.e. sigma(v~) = -2|a|^2.
FeffermanState null_lift(const ModelManifold& m, const ChartPoint& base,
                         const Eigen::VectorXcd& a, double fiber_t0,
                         double step = 1e-3, int order = 4);

// Christoffel symbols of h at a C-point from central differences of the
// metric field; Gamma[k](i, j). Fiber derivatives are identically zero.
std::vector<Eigen::MatrixXd> christoffels(const ModelManifold& m,
                                          const Eigen::VectorXd& cpoint,
                                          double fd_step = 1e-5,
                                          int fd_order = 2);

struct FeffermanSample {
  double t = 0.0;
  Eigen::VectorXd point;
  Eigen::VectorXd velocity;
  double null_defect = 0.0;  // h(v, v) at the sample
};

struct FeffermanTrajectory {
  std::vector<FeffermanSample> samples;
  IntegrationStatus status = IntegrationStatus::Completed;
  double max_null_defect = 0.0;
};

// Fixed-step RK4 on (x, v). A null-defect breach is recorded, not fatal.
FeffermanTrajectory integrate_null_geodesic(const ModelManifold& m,
                                            const FeffermanState& initial,
                                            double t_span, double step,
                                            double fd_step = 1e-5,
                                            int fd_order = 2);

// Base projection with tangents, ready for chain_residual.
std::vector<CurvePoint> projected_curve(const FeffermanTrajectory& tr);

// Levi-Civita connection forms of h in the frame {T~, X, L~_a, Lbar~_a},
// assembled from the computed Webster data:
//   sigma_b^a = phi_b^a + i delta sigma
//   sigma_b   = i tau_b + D_{b gbar} theta^gbar + C_b theta
//   C_b       = 2/(n+2) (A_{ab;}^a + i/(2(n+1)) R_{;b})
struct LeeForms {
  int n = 0;
  // omega[I*(2n+2)+K]: chart row on C of the 1-form Omega_I^K,
  // frame order I = (T~, X, L~_1.., Lbar~_1..)
  std::vector<Eigen::VectorXcd> omega;
  Eigen::MatrixXcd frame;  // columns e_I
  Eigen::MatrixXcd H;      // claimed constant frame metric
  Eigen::VectorXcd C_beta;
};

LeeForms lee_forms(const ModelManifold& m, const ChartPoint& base,
                   double step = 1e-3, int order = 4);

struct LcCheckResult {
  double frame_metric_residual = 0.0;  // |h(e_I, e_J) - H_IJ|
  double compat_residual = 0.0;        // d h(e_I,e_J) = 0 algebra on random vectors
  double christoffel_residual = 0.0;   // frame forms vs FD Christoffels
};

LcCheckResult levi_civita_forms_check(const ModelManifold& m,
                                      const ChartPoint& base, int samples = 10,
                                      unsigned seed = 1234);

}  // namespace crlab

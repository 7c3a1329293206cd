#pragma once

// CR embeddings f : M -> M^ between models, adapted coframe pairs, the CR
// second fundamental form, and the equivalence-condition checks built on it
// (chain preservation, lift condition, trace identity, Fefferman lift).
//
// The target coframe is adapted by decorating the target model: a constant
// contact rescale theta^ -> theta^/lambda followed by a pointwise unitary
// rotation U(q^) that sends the pushed-forward holomorphic frame to the
// first n slots. U is built from a retraction onto the image, so it extends
// smoothly off the image (needed by the FD stencils of the target solve).

#include "crlab/fefferman.hpp"

namespace crlab {

struct CREmbedding {
  ModelPtr source, target;
  std::string name;
  std::function<ChartPoint(const ChartPoint&)> map;
  // Jacobian of `map`, (2n^+1) x (2n+1)
  std::function<Eigen::MatrixXd(const ChartPoint&)> differential;
  // smooth left inverse of `map` near the working region
  std::function<ChartPoint(const ChartPoint&)> retraction;
};

CREmbedding identity_embedding(ModelPtr m);
// (z, u) -> (z, 0, u) between Heisenberg groups, nhat >= n
CREmbedding heisenberg_inclusion(int n, int nhat);
// Z -> (Z^1..Z^n, 0, Z^{n+1}) between spheres (zeros inserted before the
// chart's distinguished coordinate, a unitary relabeling of (Z, 0))
CREmbedding linear_sphere_embedding(int n, int nhat);
// S^3 -> S^5, (z, w) -> (z^2, sqrt(2) z w, w^2); not totally geodesic
CREmbedding whitney_embedding();

// max over sampled aspects of the CR property at p: contact-line preservation
// ||f* theta^ - lambda theta|| and absence of antiholomorphic components in
// f* theta^A.
double cr_residual(const CREmbedding& emb, const ChartPoint& p);

struct AdaptedPair {
  CREmbedding emb;
  ModelPtr target_adapted;  // decorated target model
  double lambda = 1.0;      // detected constant contact scale f* theta^ = lambda theta
  ChartPoint base;          // adaptation base point (completion pivots frozen here)
  CoframeEval source_cf;    // coframes at base / f(base)
  CoframeEval target_cf;
  double theta_residual = 0.0;   // ||f* theta^' - theta||
  double holo_residual = 0.0;    // ||f* theta^'alpha - theta^alpha||
  double normal_residual = 0.0;  // ||f* theta^'a||
};

// Builds the decorated target and verifies the pullback residuals at p.
// Throws on nonconstant lambda or rank loss of the pushforward.
AdaptedPair adapt_coframes(const CREmbedding& emb, const ChartPoint& p);

struct SecondFundamentalForm {
  int n = 0, nhat = 0;
  // omega[b-n](alpha, beta) = omega_{alpha beta}^b; empty when nhat == n
  std::vector<Eigen::MatrixXcd> omega;
  double symmetry_defect = 0.0;
  double theta_component = 0.0;      // |omega_alpha^b(T)|
  double antiholo_component = 0.0;   // |omega_alpha^b(Lbar_nu)|
  double torsion_residual = 0.0;     // ||f* tau^b||
  double norm() const;
};

SecondFundamentalForm second_fundamental_form(const AdaptedPair& pair,
                                              const ChartPoint& p);
SecondFundamentalForm second_fundamental_form(const CREmbedding& emb,
                                              const ChartPoint& p);

struct LiftConditionResult {
  Eigen::MatrixXcd C;   // C_beta^alpha = D^'_beta^alpha - D_beta^alpha
  Eigen::VectorXcd F;   // F^alpha = E^'alpha - E^alpha (reported, no gate)
  double c_norm = 0.0;
  bool sphere_target = false;
  double trace_residual = 0.0;  // sphere targets: trace-identity residual of the SFF
  bool lift_exists = false;
  bool trace_holds = false;
  bool verdicts_agree = true;
};

LiftConditionResult lift_condition(const AdaptedPair& pair, const ChartPoint& p,
                                   double tol = 1e-7);
LiftConditionResult lift_condition(const CREmbedding& emb, const ChartPoint& p,
                                   double tol = 1e-7);

struct TraceLemmaResult {
  double residual = 0.0;    // || sum omega omega-bar - ||omega||^2/(2(n+1)) g ||
  double omega_norm = 0.0;  // Frobenius norm of the input
  bool holds = false;
};

// Pure algebra on a raw symmetric tensor omega[b](alpha, beta); rejects
// asymmetric input. verdict holds <=> residual < tol * max(1, ||omega||^2).
TraceLemmaResult trace_lemma_check(const std::vector<Eigen::MatrixXcd>& omega,
                                   int n, double tol = 1e-10);

struct ChainPreservationResult {
  double residual = 0.0;  // target chain residual of the mapped source chain
  IntegrationStatus status = IntegrationStatus::Completed;
};

ChainPreservationResult chain_preservation_test(const CREmbedding& emb,
                                                const ChainState& initial,
                                                double t_span, double step,
                                                int eval_stride = 20,
                                                int cm_order = 2);

// Grid of initial a over radii x phases (first-component direction cycled
// through the components); returns the max residual over completed runs and
// throws if any run exits a chart domain.
double chain_preservation_sweep(const CREmbedding& emb, const ChartPoint& base,
                                const std::vector<double>& radii, int phases,
                                double t_span, double step,
                                int eval_stride = 20, int cm_order = 2);

struct SffComparisonReport {
  double sff_norm = 0.0;
  double mixed_ricci_norm = 0.0;  // ||Ric^(alpha, a)|| in the adapted frame
  bool evaluated = false;         // false when the target scalar curvature is nonconstant
  std::string verdict;            // "F totally geodesic" / "F not totally geodesic" / "not evaluated"
};

SffComparisonReport sff_comparison_report(const CREmbedding& emb,
                                          const ChartPoint& p,
                                          double tol = 1e-7);

// Residual of the parallelism identity for the SFF: the theta^nubar
// components of
//   d omega_{alpha gamma}^a - omega_{mu gamma}^a omega_alpha^mu
//   - omega_{alpha mu}^a omega_gamma^mu + omega_{alpha gamma}^b omega_b^a
// compared against -R^_alpha^a_{gamma nubar}, max abs over all indices.
// omega_scale multiplies the SFF field (synthetic violation probe); the
// norm of the curvature term is written to curvature_term_norm if given.
double covariant_derivative_sff(const AdaptedPair& pair, const ChartPoint& p,
                                double omega_scale = 1.0,
                                double* curvature_term_norm = nullptr,
                                double fd_step = 1e-3, int fd_order = 4);

// Fiber-map 1-form of the Fefferman lift F = (f, s):
//   ds = kappa dt + rho,  kappa = (nhat+2)/(n+2),
//   rho = (nhat+2) (sigma_base - f* sigma^_base)
// returned as the base-row of rho at p (the dt coefficient is kappa).
Eigen::VectorXd lift_form_row(const AdaptedPair& pair, const ChartPoint& p,
                              double step = 1e-3, int order = 4);

struct IsometricLiftResult {
  double dt_coefficient = 0.0;
  std::vector<double> loop_defects;  // closedness defects of rho
  double max_loop_defect = 0.0;
  std::vector<double> s;  // fiber values along the base path (s(0) = s0)
};

// Integrates rho along the polygonal base path and measures its loop
// integrals over the given loops (closedness <=> local solvability).
IsometricLiftResult isometric_lift(const AdaptedPair& pair,
                                   const std::vector<ChartPoint>& base_path,
                                   const std::vector<std::vector<ChartPoint>>& loops,
                                   double s0 = 0.0, int nodes_per_edge = 50);

// max |F* h^ (u,v) - h(u,v)| over random unit tangent pairs at p, with
// dF assembled from the embedding differential and the ds row.
double lift_isometry_residual(const AdaptedPair& pair, const ChartPoint& p,
                              int samples = 100, unsigned seed = 2024,
                              double step = 1e-3, int order = 4);

}  // namespace crlab

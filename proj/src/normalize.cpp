#include "crlab/normalize.hpp"

namespace crlab {

CoframeEval normalize_coframe(const Eigen::VectorXd& theta, const Eigen::MatrixXcd& eta,
                              const Eigen::MatrixXd& dtheta) {
  const int n = eta.rows();
  const int D = 2 * n + 1;
  if (theta.size() != D || dtheta.rows() != D || dtheta.cols() != D)
    throw std::invalid_argument("normalize_coframe: dimension mismatch");

  std::array<double, kMaxDim> th{};
  for (int i = 0; i < D; ++i) th[i] = theta[i];
  CMat<double> eta_rows(n, D);
  for (int a = 0; a < n; ++a)
    for (int i = 0; i < D; ++i) eta_rows(a, i) = {eta(a, i).real(), eta(a, i).imag()};
  std::array<double, kMaxDim * kMaxDim> dth{};
  for (int i = 0; i < D; ++i)
    for (int k = 0; k < D; ++k) dth[i * D + k] = dtheta(i, k);

  NormalizedCoframe<double> nc = normalize_core(n, th, eta_rows, dth);

  CoframeEval cf;
  cf.theta = theta;
  cf.theta_alpha = Eigen::MatrixXcd(n, D);
  for (int a = 0; a < n; ++a)
    for (int i = 0; i < D; ++i) cf.theta_alpha(a, i) = Cd(nc.alpha(a, i).re, nc.alpha(a, i).im);
  cf.levi = Eigen::MatrixXcd::Identity(n, n);
  return cf;
}

}  // namespace crlab

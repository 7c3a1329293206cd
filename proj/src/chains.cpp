#include "crlab/chains.hpp"

#include <cmath>
#include <stdexcept>

namespace crlab {

ChainDerivative chain_rhs(const ModelManifold& m, const ChainState& s,
                          int cm_order) {
  const int n = m.n();
  if (!m.contains(s.point)) throw std::domain_error("chain_rhs: point outside domain");
  CoframeJet j = m.jet(s.point);
  ConnectionEval c = solve_connection_from_jet(j);
  FrameEval fr = frame(j.cf);
  ChernMoserEval cm = chern_moser(m, s.point, 1e-3, cm_order);

  Eigen::VectorXcd w = 2.0 * (fr.L * s.a);  // sum_m 2 a^m L_m
  ChainDerivative d;
  d.point_dot = fr.T + 2.0 * w.real();

  const double a2 = s.a.squaredNorm();
  const Eigen::VectorXcd av = 2.0 * s.a;  // theta^m(gamma-dot)
  d.a_dot.resize(n);
  for (int al = 0; al < n; ++al) {
    Cd acc = 4.0 * Cd(0, 1) * s.a(al) * a2;
    for (int b = 0; b < n; ++b)
      acc -= (c.omega_on(b, al, 1.0, av) + cm.D(b, al)) * s.a(b);
    Cd phi = c.tau_on(al, av) + cm.E(al);
    for (int mu = 0; mu < n; ++mu) phi += cm.D(mu, al) * av(mu);
    d.a_dot(al) = acc - 0.5 * phi;
  }
  return d;
}

ChainTrajectory integrate_chain(const ModelManifold& m, const ChainState& initial,
                                double t_span, double step,
                                double blow_up, int cm_order) {
  ChainTrajectory tr;
  ChainState y = initial;
  const int nsteps = static_cast<int>(std::llround(t_span / step));

  auto push = [&](double t) {
    CurveSample cs;
    cs.t = t;
    cs.point = y.point;
    if (m.has_ambient()) cs.ambient = m.ambient(y.point);
    tr.samples.push_back(std::move(cs));
    tr.a.push_back(y.a);
  };

  if (!m.contains(y.point)) {
    tr.status = IntegrationStatus::DomainExit;
    return tr;
  }
  push(0.0);
  for (int i = 0; i < nsteps; ++i) {
    ChainState y1;
    try {
      ChainDerivative k1 = chain_rhs(m, y, cm_order);
      ChainDerivative k2 = chain_rhs(
          m, {y.point + 0.5 * step * k1.point_dot, y.a + 0.5 * step * k1.a_dot},
          cm_order);
      ChainDerivative k3 = chain_rhs(
          m, {y.point + 0.5 * step * k2.point_dot, y.a + 0.5 * step * k2.a_dot},
          cm_order);
      ChainDerivative k4 = chain_rhs(
          m, {y.point + step * k3.point_dot, y.a + step * k3.a_dot}, cm_order);
      y1.point = y.point + (step / 6.0) * (k1.point_dot + 2.0 * k2.point_dot +
                                           2.0 * k3.point_dot + k4.point_dot);
      y1.a = y.a + (step / 6.0) *
                       (k1.a_dot + 2.0 * k2.a_dot + 2.0 * k3.a_dot + k4.a_dot);
    } catch (const std::exception&) {
      tr.status = IntegrationStatus::DomainExit;
      return tr;
    }
    if (!m.contains(y1.point)) {
      tr.status = IntegrationStatus::DomainExit;
      return tr;
    }
    if (y1.a.norm() > blow_up) {
      tr.status = IntegrationStatus::BlowUp;
      return tr;
    }
    y = y1;
    push((i + 1) * step);
  }
  tr.status = IntegrationStatus::Completed;
  return tr;
}

std::vector<CurvePoint> trajectory_curve(const ModelManifold& m,
                                         const ChainTrajectory& tr) {
  std::vector<CurvePoint> out(tr.samples.size());
  for (std::size_t i = 0; i < tr.samples.size(); ++i) {
    FrameEval fr = frame(m.coframe(tr.samples[i].point));
    Eigen::VectorXcd w = 2.0 * (fr.L * tr.a[i]);
    out[i] = {tr.samples[i].t, tr.samples[i].point,
              Eigen::VectorXd(fr.T + 2.0 * w.real())};
  }
  return out;
}

double chain_residual(const ModelManifold& m, const std::vector<CurvePoint>& curve,
                      int cm_order, int eval_stride) {
  const int N = static_cast<int>(curve.size());
  if (N < 3) throw std::invalid_argument("chain_residual: need at least 3 samples");
  if (eval_stride < 1) throw std::invalid_argument("chain_residual: bad stride");

  std::vector<Eigen::VectorXcd> a(N);
  std::vector<double> thv(N);
  for (int i = 0; i < N; ++i) {
    CoframeEval cf = m.coframe(curve[i].point);
    double th = cf.theta.dot(curve[i].tangent);
    if (std::abs(th) <= 1e-6)
      throw std::runtime_error("chain_residual: transversality violated");
    thv[i] = th;
    a[i] = (cf.theta_alpha * curve[i].tangent.cast<Cd>()) / (2.0 * th);
  }

  // d a / d s via the K-point Lagrange derivative (one-sided at the ends),
  // then d a / d t_chain = (d a / d s) / theta(tangent)
  const int K = std::min(N, 5);
  double worst = 0.0;
  int i = 0;
  while (i < N) {
    const int i0 = std::min(std::max(i - K / 2, 0), N - K);
    const double x = curve[i].t;
    Eigen::VectorXcd dadt = Eigen::VectorXcd::Zero(a[0].size());
    for (int j = 0; j < K; ++j) {
      // derivative of the j-th Lagrange basis at x
      double denom = 1.0, num = 0.0;
      for (int q = 0; q < K; ++q)
        if (q != j) denom *= curve[i0 + j].t - curve[i0 + q].t;
      for (int k = 0; k < K; ++k) {
        if (k == j) continue;
        double prod = 1.0;
        for (int q = 0; q < K; ++q)
          if (q != j && q != k) prod *= x - curve[i0 + q].t;
        num += prod;
      }
      dadt += (num / denom) * a[i0 + j];
    }
    dadt /= thv[i];
    ChainDerivative rhs = chain_rhs(m, {curve[i].point, a[i]}, cm_order);
    worst = std::max(worst, (dadt - rhs.a_dot).cwiseAbs().maxCoeff());
    if (i == N - 1) break;
    i = std::min(i + eval_stride, N - 1);
  }
  return worst;
}

}  // namespace crlab

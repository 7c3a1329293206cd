#include "crlab/curvature.hpp"

#include <stdexcept>

namespace crlab {
namespace {

struct ConnSample {
  CoframeJet j;
  ConnectionEval c;
};

ConnSample conn_at(const ModelManifold& m, const ChartPoint& p) {
  ConnSample s{m.jet(p), {}};
  s.c = solve_connection_from_jet(s.j);
  return s;
}

// 4th- or 2nd-order central first derivative of a sampled vector of rows.
template <class F>
std::vector<Eigen::VectorXcd> central_rows(const F& rows_at, const ChartPoint& p,
                                           int k, double step, int order) {
  ChartPoint q = p;
  if (order >= 4) {
    q[k] = p[k] + step;
    auto f1 = rows_at(q);
    q[k] = p[k] - step;
    auto fm1 = rows_at(q);
    q[k] = p[k] + 2 * step;
    auto f2 = rows_at(q);
    q[k] = p[k] - 2 * step;
    auto fm2 = rows_at(q);
    std::vector<Eigen::VectorXcd> d(f1.size());
    for (std::size_t i = 0; i < f1.size(); ++i)
      d[i] = (-f2[i] + 8.0 * f1[i] - 8.0 * fm1[i] + fm2[i]) / (12.0 * step);
    return d;
  }
  q[k] = p[k] + step;
  auto f1 = rows_at(q);
  q[k] = p[k] - step;
  auto fm1 = rows_at(q);
  std::vector<Eigen::VectorXcd> d(f1.size());
  for (std::size_t i = 0; i < f1.size(); ++i) d[i] = (f1[i] - fm1[i]) / (2.0 * step);
  return d;
}

}  // namespace

CurvatureEval curvature(const ModelManifold& m, const ChartPoint& p,
                        double step, int order) {
  const int n = m.n(), dim = m.dim();
  ConnSample s0 = conn_at(m, p);
  const CoframeEval& cf0 = s0.j.cf;
  FrameEval fr0 = frame(cf0);

  std::vector<Eigen::VectorXcd> om0(n * n), tau0(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) om0[a * n + b] = s0.c.omega_row(cf0, a, b);
  for (int b = 0; b < n; ++b) tau0[b] = s0.c.tau_row(cf0, b);

  auto rows_at = [&](const ChartPoint& q) {
    ConnSample s = conn_at(m, q);
    std::vector<Eigen::VectorXcd> rows(n * n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) rows[a * n + b] = s.c.omega_row(s.j.cf, a, b);
    return rows;
  };
  std::vector<std::vector<Eigen::VectorXcd>> der(dim);
  for (int k = 0; k < dim; ++k) der[k] = central_rows(rows_at, p, k, step, order);

  CurvatureEval cv;
  cv.n = n;
  cv.blocks.resize(n * n);
  cv.W1.resize(n * n);
  cv.W2.resize(n * n);
  cv.ricci = Eigen::MatrixXcd::Zero(n, n);
  double resid = 0.0;

  for (int a = 0; a < n; ++a) {
    Eigen::VectorXcd theta_a = cf0.theta_alpha.row(a).adjoint();  // conj row
    for (int b = 0; b < n; ++b) {
      Eigen::MatrixXcd dom(dim, dim);
      for (int k = 0; k < dim; ++k)
        for (int i = 0; i < dim; ++i)
          dom(k, i) = der[k][a * n + b](i) - der[i][a * n + b](k);

      Eigen::MatrixXcd Pi = dom;
      for (int g = 0; g < n; ++g) Pi -= wedge11(om0[a * n + g], om0[g * n + b]);
      Pi -= Cd(0, 1) * wedge11(theta_a, tau0[b]);
      Pi += wedge11(Eigen::VectorXcd(tau0[a].conjugate()),
                    Eigen::VectorXcd(cf0.theta_alpha.row(b).transpose()));

      Sectors2 sec = decompose2(Pi, fr0);
      cv.blocks[a * n + b] = sec.hhbar;
      cv.W1[a * n + b] = -sec.th;
      cv.W2[a * n + b] = sec.thbar;
      if (a == b) cv.ricci += sec.hhbar;

      Sectors2 kept = sec;
      kept.hh.setZero();
      kept.hbhb.setZero();
      Eigen::MatrixXcd rec = recompose2(kept, cf0);
      resid = std::max(resid, (rec - Pi).cwiseAbs().maxCoeff());
    }
  }
  cv.scalar = cv.ricci.trace().real();
  cv.expansion_residual = resid;
  return cv;
}

void ricci_scalar(const ModelManifold& m, const ChartPoint& p,
                  Eigen::MatrixXcd& ricci, double& scalar,
                  double step, int order) {
  const int n = m.n(), dim = m.dim();
  FrameEval fr0 = frame(m.coframe(p));

  auto trace_at = [&](const ChartPoint& q) {
    ConnSample s = conn_at(m, q);
    std::vector<Eigen::VectorXcd> rows(1);
    rows[0] = Eigen::VectorXcd::Zero(dim);
    for (int a = 0; a < n; ++a) rows[0] += s.c.omega_row(s.j.cf, a, a);
    return rows;
  };
  std::vector<Eigen::VectorXcd> der(dim);
  for (int k = 0; k < dim; ++k) der[k] = central_rows(trace_at, p, k, step, order)[0];

  Eigen::MatrixXcd dtr(dim, dim);
  for (int k = 0; k < dim; ++k)
    for (int i = 0; i < dim; ++i) dtr(k, i) = der[k](i) - der[i](k);

  Sectors2 sec = decompose2(dtr, fr0);
  ricci = sec.hhbar;
  scalar = ricci.trace().real();
}

double pseudo_einstein_residual(const CurvatureEval& cv) {
  Eigen::MatrixXcd tf =
      cv.ricci - (cv.scalar / cv.n) * Eigen::MatrixXcd::Identity(cv.n, cv.n);
  return tf.norm();
}

Eigen::VectorXd pe_form_row(const ModelManifold& m, const ChartPoint& p,
                            double step, int order) {
  const int n = m.n(), dim = m.dim();
  ConnSample s0 = conn_at(m, p);
  Eigen::MatrixXcd ric;
  double R = 0.0;
  ricci_scalar(m, p, ric, R, step, order);

  Eigen::VectorXcd tr = Eigen::VectorXcd::Zero(dim);
  for (int a = 0; a < n; ++a) tr += s0.c.omega_row(s0.j.cf, a, a);
  return (Cd(0, 1) * tr).real() - (R / n) * s0.j.cf.theta;
}

double closedness_defect(const ModelManifold& m, const ChartPoint& p,
                         const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                         double side, int nodes_per_edge) {
  return closedness_defect(m, rectangle_loop(p, u, v, side), nodes_per_edge);
}

double closedness_defect(const ModelManifold& m,
                         const std::vector<ChartPoint>& loop,
                         int nodes_per_edge) {
  auto row = [&](const ChartPoint& q) { return pe_form_row(m, q); };
  return loop_integral(row, loop, nodes_per_edge);
}

ChernMoserEval chern_moser(const ModelManifold& m, const ChartPoint& p,
                           double step, int order) {
  const int n = m.n(), dim = m.dim();
  ConnSample s0 = conn_at(m, p);
  const CoframeEval& cf0 = s0.j.cf;
  FrameEval fr0 = frame(cf0);

  // one merged stencil: the trace row of omega (for Ricci) packed with the
  // rows of A, so each offset costs a single connection solve
  auto fields_at = [&](const ChartPoint& q) {
    ConnSample s = conn_at(m, q);
    std::vector<Eigen::VectorXcd> rows(1 + n);
    rows[0] = Eigen::VectorXcd::Zero(dim);
    for (int a = 0; a < n; ++a) rows[0] += s.c.omega_row(s.j.cf, a, a);
    for (int a = 0; a < n; ++a) rows[1 + a] = s.c.A.row(a).transpose();
    return rows;
  };
  std::vector<std::vector<Eigen::VectorXcd>> der(dim);
  for (int k = 0; k < dim; ++k) der[k] = central_rows(fields_at, p, k, step, order);

  Eigen::MatrixXcd dtr(dim, dim);
  for (int k = 0; k < dim; ++k)
    for (int i = 0; i < dim; ++i) dtr(k, i) = der[k][0](i) - der[i][0](k);

  ChernMoserEval cm;
  cm.n = n;
  cm.ricci = decompose2(dtr, fr0).hhbar;
  cm.scalar = cm.ricci.trace().real();
  Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(n, n);
  cm.D = (Cd(0, 1) / double(n + 2)) *
         (cm.ricci - cm.scalar / (2.0 * (n + 1)) * I);

  // div_A^a = A^{am}_{;m}
  //        = sum_m [ dA^{am}(L_m) + sum_g ( A^{gm} w_g^a(L_m) + A^{ag} w_g^m(L_m) ) ]
  cm.div_A = Eigen::VectorXcd::Zero(n);
  for (int a = 0; a < n; ++a) {
    Cd acc = 0;
    for (int mu = 0; mu < n; ++mu) {
      for (int k = 0; k < dim; ++k) acc += der[k][1 + a](mu) * fr0.L(k, mu);
      for (int g = 0; g < n; ++g)
        acc += s0.c.A(g, mu) * s0.c.omega_H[mu](g, a) +
               s0.c.A(a, g) * s0.c.omega_H[mu](g, mu);
    }
    cm.div_A(a) = acc;
  }

  // div_D^a = D^{mbar a}_{;mbar}, with the D field rebuilt at shifted points
  // from its own Ricci stencil (numerically D^{mbar a} = D(m, a))
  const int inner = (order >= 4) ? 4 : 2;
  auto D_at = [&](const ChartPoint& q) {
    Eigen::MatrixXcd ric;
    double R = 0.0;
    ricci_scalar(m, q, ric, R, step, inner);
    return Eigen::MatrixXcd((Cd(0, 1) / double(n + 2)) *
                            (ric - R / (2.0 * (n + 1)) * I));
  };
  std::vector<Eigen::MatrixXcd> dD(dim);
  for (int k = 0; k < dim; ++k) {
    ChartPoint q = p;
    q[k] = p[k] + step;
    Eigen::MatrixXcd Dp = D_at(q);
    q[k] = p[k] - step;
    Eigen::MatrixXcd Dm = D_at(q);
    dD[k] = (Dp - Dm) / (2.0 * step);
  }
  cm.div_D = Eigen::VectorXcd::Zero(n);
  for (int a = 0; a < n; ++a) {
    Cd acc = 0;
    for (int mu = 0; mu < n; ++mu) {
      for (int k = 0; k < dim; ++k) acc += dD[k](mu, a) * std::conj(fr0.L(k, mu));
      for (int g = 0; g < n; ++g)
        acc += cm.D(g, a) * std::conj(s0.c.omega_H[mu](g, mu)) +
               cm.D(mu, g) * s0.c.omega_Hb[mu](g, a);
    }
    cm.div_D(a) = acc;
  }

  cm.E = (2.0 * Cd(0, 1) / double(2 * n + 1)) * (cm.div_A - cm.div_D);

  Eigen::VectorXcd thetaC = cf0.theta.cast<Cd>();
  cm.phi_matrix.resize(n * n);
  for (int b = 0; b < n; ++b)
    for (int a = 0; a < n; ++a)
      cm.phi_matrix[b * n + a] = s0.c.omega_row(cf0, b, a) + cm.D(b, a) * thetaC;
  cm.phi_vector.resize(n);
  for (int a = 0; a < n; ++a) {
    Eigen::VectorXcd row = s0.c.tau_row(cf0, a) + cm.E(a) * thetaC;
    for (int mu = 0; mu < n; ++mu)
      row += cm.D(mu, a) * cf0.theta_alpha.row(mu).transpose();
    cm.phi_vector[a] = row;
  }
  return cm;
}

}  // namespace crlab

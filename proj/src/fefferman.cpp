#include "crlab/fefferman.hpp"

#include <cmath>
#include <stdexcept>

namespace crlab {
namespace {

Eigen::VectorXcd lift_row(const Eigen::VectorXcd& r) {
  Eigen::VectorXcd o(r.size() + 1);
  o.head(r.size()) = r;
  o(r.size()) = 0.0;
  return o;
}

Cd eval_row(const Eigen::VectorXcd& row, const Eigen::VectorXd& v) {
  Cd acc = 0.0;
  for (int i = 0; i < row.size(); ++i) acc += row(i) * v(i);
  return acc;
}

}  // namespace

SigmaEval sigma(const ModelManifold& m, const ChartPoint& base, double step,
                int order) {
  const int n = m.n(), dim = m.dim();
  CoframeJet j = m.jet(base);
  if ((j.cf.levi - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-10)
    throw std::logic_error("sigma: coframe is not Levi-normalized");
  ConnectionEval c = solve_connection_from_jet(j);

  Eigen::MatrixXcd ric;
  double R = 0.0;
  ricci_scalar(m, base, ric, R, step, order);

  Eigen::VectorXcd tr = Eigen::VectorXcd::Zero(dim);
  for (int a = 0; a < n; ++a) tr += c.omega_row(j.cf, a, a);

  SigmaEval s;
  s.scalar_R = R;
  s.base_row =
      ((Cd(0, 1) * tr).real() - (R / (2.0 * (n + 1))) * j.cf.theta) / double(n + 2);
  s.row.resize(dim + 1);
  s.row.head(dim) = s.base_row;
  s.row(dim) = 1.0 / double(n + 2);
  return s;
}

MetricEval metric(const ModelManifold& m, const Eigen::VectorXd& where,
                  double step, int order) {
  const int n = m.n(), dim = m.dim();
  if (where.size() != dim && where.size() != dim + 1)
    throw std::invalid_argument("metric: bad point size");
  ChartPoint base = where.head(dim);

  CoframeEval cf = m.coframe(base);
  SigmaEval s = sigma(m, base, step, order);

  const int N = dim + 1;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(N, N);
  for (int a = 0; a < n; ++a)
    for (int i = 0; i < dim; ++i)
      for (int k = 0; k < dim; ++k)
        h(i, k) += (cf.theta_alpha(a, i) * std::conj(cf.theta_alpha(a, k))).real();

  Eigen::VectorXd thetaC = Eigen::VectorXd::Zero(N);
  thetaC.head(dim) = cf.theta;
  h += thetaC * s.row.transpose() + s.row * thetaC.transpose();

  return MetricEval{std::move(h)};
}

FeffermanState null_lift(const ModelManifold& m, const ChartPoint& base,
                         const Eigen::VectorXcd& a, double fiber_t0, double step,
                         int order) {
  const int n = m.n(), dim = m.dim();
  FrameEval fr = frame(m.coframe(base));
  SigmaEval s = sigma(m, base, step, order);

  Eigen::VectorXcd w = 2.0 * (fr.L * a);
  Eigen::VectorXd v = fr.T + 2.0 * w.real();
  const double target = -2.0 * a.squaredNorm();  // sigma(v~)
  const double vt = (target - s.base_row.dot(v)) * double(n + 2);

  FeffermanState st;
  st.point.resize(dim + 1);
  st.point.head(dim) = base;
  st.point(dim) = fiber_t0;
  st.velocity.resize(dim + 1);
  st.velocity.head(dim) = v;
  st.velocity(dim) = vt;
  return st;
}

namespace {

struct GeoEval {
  std::vector<Eigen::MatrixXd> G;
  Eigen::MatrixXd h0;
};

GeoEval geo_at(const ModelManifold& m, const Eigen::VectorXd& cpoint,
               double fd_step, int fd_order) {
  const int dim = m.dim(), N = dim + 1;
  GeoEval ge;
  ge.h0 = metric(m, cpoint).h;

  std::vector<Eigen::MatrixXd> dh(N, Eigen::MatrixXd::Zero(N, N));
  for (int jx = 0; jx < dim; ++jx) {  // fiber column stays identically zero
    Eigen::VectorXd q = cpoint;
    if (fd_order >= 4) {
      q(jx) = cpoint(jx) + fd_step;
      Eigen::MatrixXd f1 = metric(m, q).h;
      q(jx) = cpoint(jx) - fd_step;
      Eigen::MatrixXd fm1 = metric(m, q).h;
      q(jx) = cpoint(jx) + 2 * fd_step;
      Eigen::MatrixXd f2 = metric(m, q).h;
      q(jx) = cpoint(jx) - 2 * fd_step;
      Eigen::MatrixXd fm2 = metric(m, q).h;
      dh[jx] = (-f2 + 8.0 * f1 - 8.0 * fm1 + fm2) / (12.0 * fd_step);
    } else {
      q(jx) = cpoint(jx) + fd_step;
      Eigen::MatrixXd f1 = metric(m, q).h;
      q(jx) = cpoint(jx) - fd_step;
      Eigen::MatrixXd fm1 = metric(m, q).h;
      dh[jx] = (f1 - fm1) / (2.0 * fd_step);
    }
  }

  Eigen::MatrixXd hinv = ge.h0.inverse();
  ge.G.assign(N, Eigen::MatrixXd::Zero(N, N));
  for (int k = 0; k < N; ++k)
    for (int i = 0; i < N; ++i)
      for (int jx = 0; jx < N; ++jx) {
        double acc = 0.0;
        for (int l = 0; l < N; ++l)
          acc += hinv(k, l) * (dh[i](l, jx) + dh[jx](l, i) - dh[l](i, jx));
        ge.G[k](i, jx) = 0.5 * acc;
      }
  return ge;
}

Eigen::VectorXd geo_acc(const GeoEval& ge, const Eigen::VectorXd& v) {
  const int N = v.size();
  Eigen::VectorXd a(N);
  for (int k = 0; k < N; ++k) a(k) = -v.dot(ge.G[k] * v);
  return a;
}

}  // namespace

std::vector<Eigen::MatrixXd> christoffels(const ModelManifold& m,
                                          const Eigen::VectorXd& cpoint,
                                          double fd_step, int fd_order) {
  return geo_at(m, cpoint, fd_step, fd_order).G;
}

FeffermanTrajectory integrate_null_geodesic(const ModelManifold& m,
                                            const FeffermanState& initial,
                                            double t_span, double step,
                                            double fd_step, int fd_order) {
  const int dim = m.dim();
  FeffermanTrajectory tr;
  Eigen::VectorXd x = initial.point, v = initial.velocity;
  const int nsteps = static_cast<int>(std::llround(t_span / step));

  auto push = [&](double t, const GeoEval& ge) {
    FeffermanSample s;
    s.t = t;
    s.point = x;
    s.velocity = v;
    s.null_defect = v.dot(ge.h0 * v);
    tr.max_null_defect = std::max(tr.max_null_defect, std::abs(s.null_defect));
    tr.samples.push_back(std::move(s));
  };

  try {
    GeoEval ge0 = geo_at(m, x, fd_step, fd_order);
    push(0.0, ge0);
    for (int i = 0; i < nsteps; ++i) {
      // RK4 on (x, v); ge0 serves as the k1 stage
      Eigen::VectorXd k1x = v, k1v = geo_acc(ge0, v);
      GeoEval g2 = geo_at(m, x + 0.5 * step * k1x, fd_step, fd_order);
      Eigen::VectorXd k2x = v + 0.5 * step * k1v,
                      k2v = geo_acc(g2, v + 0.5 * step * k1v);
      GeoEval g3 = geo_at(m, x + 0.5 * step * k2x, fd_step, fd_order);
      Eigen::VectorXd k3x = v + 0.5 * step * k2v,
                      k3v = geo_acc(g3, v + 0.5 * step * k2v);
      GeoEval g4 = geo_at(m, x + step * k3x, fd_step, fd_order);
      Eigen::VectorXd k4x = v + step * k3v, k4v = geo_acc(g4, v + step * k3v);

      x += (step / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
      v += (step / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
      if (!m.contains(x.head(dim))) {
        tr.status = IntegrationStatus::DomainExit;
        return tr;
      }
      ge0 = geo_at(m, x, fd_step, fd_order);
      push((i + 1) * step, ge0);
    }
  } catch (const std::exception&) {
    tr.status = IntegrationStatus::DomainExit;
    return tr;
  }
  tr.status = IntegrationStatus::Completed;
  return tr;
}

std::vector<CurvePoint> projected_curve(const FeffermanTrajectory& tr) {
  std::vector<CurvePoint> out(tr.samples.size());
  for (std::size_t i = 0; i < tr.samples.size(); ++i) {
    const auto& s = tr.samples[i];
    const int dim = static_cast<int>(s.point.size()) - 1;
    out[i] = {s.t, ChartPoint(s.point.head(dim)),
              Eigen::VectorXd(s.velocity.head(dim))};
  }
  return out;
}

LeeForms lee_forms(const ModelManifold& m, const ChartPoint& base, double step,
                   int order) {
  const int n = m.n(), dim = m.dim(), F = 2 * n + 2, N = dim + 1;
  CoframeJet j = m.jet(base);
  ConnectionEval c = solve_connection_from_jet(j);
  FrameEval fr = frame(j.cf);
  ChernMoserEval cm = chern_moser(m, base, step, order);
  SigmaEval sg = sigma(m, base, step, order);

  // C_b = 2/(n+2) ( sum_al A_{al b ; albar} + i/(2(n+1)) dR(L_b) ) with
  // A_{al b} = conj(A^{al b}) and
  // A_{al b ; nubar} = dA_{al b}(Lbar_nu) - A_{g b} w_al^g(Lbar_nu)
  //                                       - A_{al g} w_b^g(Lbar_nu)
  std::vector<Eigen::MatrixXcd> dAlow(dim);
  std::vector<double> dR(dim, 0.0);
  for (int k = 0; k < dim; ++k) {
    ChartPoint q = base;
    q(k) = base(k) + step;
    Eigen::MatrixXcd Ap = solve_connection(m, q).A.conjugate();
    Eigen::MatrixXcd rp;
    double Rp = 0.0;
    ricci_scalar(m, q, rp, Rp, step, 2);
    q(k) = base(k) - step;
    Eigen::MatrixXcd Am = solve_connection(m, q).A.conjugate();
    Eigen::MatrixXcd rm;
    double Rm = 0.0;
    ricci_scalar(m, q, rm, Rm, step, 2);
    dAlow[k] = (Ap - Am) / (2.0 * step);
    dR[k] = (Rp - Rm) / (2.0 * step);
  }

  LeeForms lf;
  lf.n = n;
  lf.C_beta.resize(n);
  for (int b = 0; b < n; ++b) {
    Cd acc = 0.0;
    for (int al = 0; al < n; ++al) {
      Cd dterm = 0.0;
      for (int k = 0; k < dim; ++k) dterm += dAlow[k](al, b) * std::conj(fr.L(k, al));
      acc += dterm;
      for (int g = 0; g < n; ++g)
        acc -= std::conj(c.A(g, b)) * c.omega_Hb[al](al, g) +
               std::conj(c.A(al, g)) * c.omega_Hb[al](b, g);
    }
    Cd dRLb = 0.0;
    for (int k = 0; k < dim; ++k) dRLb += dR[k] * fr.L(k, b);
    lf.C_beta(b) = (2.0 / double(n + 2)) * (acc + Cd(0, 1) / (2.0 * (n + 1)) * dRLb);
  }

  // ingredient rows on C
  Eigen::VectorXcd thetaC = lift_row(j.cf.theta.cast<Cd>());
  Eigen::VectorXcd sigmaC = sg.row.cast<Cd>();
  std::vector<Eigen::VectorXcd> th(n), tau(n);
  for (int a = 0; a < n; ++a) {
    th[a] = lift_row(j.cf.theta_alpha.row(a).transpose());
    tau[a] = lift_row(c.tau_row(j.cf, a));
  }
  std::vector<Eigen::VectorXcd> sig_ba(n * n), sig_b(n);
  for (int b = 0; b < n; ++b) {
    for (int a = 0; a < n; ++a) {
      Eigen::VectorXcd row = lift_row(c.omega_row(j.cf, b, a)) + cm.D(b, a) * thetaC;
      if (a == b) row += Cd(0, 1) * sigmaC;
      sig_ba[b * n + a] = row;
    }
    Eigen::VectorXcd row = Cd(0, 1) * tau[b].conjugate();
    // the lowered D here is the hermitian R-combination, i.e. -i times the
    // mixed-index D of phi_b^a (verified against FD Christoffels)
    for (int g = 0; g < n; ++g) row += Cd(0, -1) * cm.D(b, g) * th[g].conjugate();
    row += lf.C_beta(b) * thetaC;
    sig_b[b] = row;
  }

  lf.omega.assign(F * F, Eigen::VectorXcd::Zero(N));
  for (int a = 0; a < n; ++a) {
    lf.omega[0 * F + (2 + a)] = Cd(0, 1) * sig_b[a].conjugate();  // i sigma^a
    lf.omega[0 * F + (n + 2 + a)] = -Cd(0, 1) * sig_b[a];
    lf.omega[1 * F + (2 + a)] = Cd(0, 1) * th[a];
    lf.omega[1 * F + (n + 2 + a)] = -Cd(0, 1) * th[a].conjugate();
  }
  for (int b = 0; b < n; ++b) {
    lf.omega[(2 + b) * F + 0] = Cd(0, 0.5) * th[b].conjugate();  // i/2 theta_b
    lf.omega[(2 + b) * F + 1] = Cd(0, 0.5) * sig_b[b];
    lf.omega[(n + 2 + b) * F + 0] = -Cd(0, 0.5) * th[b];
    lf.omega[(n + 2 + b) * F + 1] = -Cd(0, 0.5) * sig_b[b].conjugate();
    for (int a = 0; a < n; ++a) {
      lf.omega[(2 + b) * F + (2 + a)] = sig_ba[b * n + a];
      lf.omega[(n + 2 + b) * F + (n + 2 + a)] = sig_ba[b * n + a].conjugate();
    }
  }

  lf.frame = Eigen::MatrixXcd::Zero(N, F);
  auto tcomp = [&](const Eigen::VectorXcd& col) {
    Cd acc = 0.0;
    for (int k = 0; k < dim; ++k) acc += sg.base_row(k) * col(k);
    return -double(n + 2) * acc;
  };
  lf.frame.col(0).head(dim) = fr.T.cast<Cd>();
  lf.frame(dim, 0) = tcomp(fr.T.cast<Cd>());
  lf.frame(dim, 1) = double(n + 2);
  for (int a = 0; a < n; ++a) {
    lf.frame.col(2 + a).head(dim) = fr.L.col(a);
    lf.frame(dim, 2 + a) = tcomp(fr.L.col(a));
    lf.frame.col(n + 2 + a) = lf.frame.col(2 + a).conjugate();
  }

  lf.H = Eigen::MatrixXcd::Zero(F, F);
  lf.H(0, 1) = lf.H(1, 0) = 1.0;
  for (int a = 0; a < n; ++a) lf.H(2 + a, n + 2 + a) = lf.H(n + 2 + a, 2 + a) = 0.5;
  return lf;
}

LcCheckResult levi_civita_forms_check(const ModelManifold& m,
                                      const ChartPoint& base, int samples,
                                      unsigned seed) {
  const int n = m.n(), dim = m.dim(), F = 2 * n + 2, N = dim + 1;
  LeeForms lf = lee_forms(m, base);
  Eigen::MatrixXcd h0 = metric(m, base).h.cast<Cd>();

  LcCheckResult r;
  for (int I = 0; I < F; ++I)
    for (int J = 0; J < F; ++J) {
      Cd val = (lf.frame.col(I).transpose() * h0 * lf.frame.col(J)).value();
      r.frame_metric_residual =
          std::max(r.frame_metric_residual, std::abs(val - lf.H(I, J)));
    }

  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  auto rand_vec = [&](int len) {
    Eigen::VectorXd v(len);
    for (int i = 0; i < len; ++i) v(i) = U(rng);
    return v;
  };

  for (int s = 0; s < samples; ++s) {
    Eigen::VectorXd v = rand_vec(N);
    Eigen::MatrixXcd Ov(F, F);
    for (int I = 0; I < F; ++I)
      for (int K = 0; K < F; ++K) Ov(I, K) = eval_row(lf.omega[I * F + K], v);
    Eigen::MatrixXcd Mres = Ov * lf.H + (Ov * lf.H).transpose();
    r.compat_residual = std::max(r.compat_residual, Mres.cwiseAbs().maxCoeff());
  }

  // cross-check against FD Christoffels: differentiate fields with constant
  // frame coefficients both ways
  Eigen::VectorXd cpoint = Eigen::VectorXd::Zero(N);
  cpoint.head(dim) = base;
  std::vector<Eigen::MatrixXd> G = christoffels(m, cpoint);

  auto frame_field = [&](const ChartPoint& q) {
    FrameEval fq = frame(m.coframe(q));
    SigmaEval sq = sigma(m, q);
    Eigen::MatrixXcd E = Eigen::MatrixXcd::Zero(N, F);
    auto tc = [&](const Eigen::VectorXcd& col) {
      Cd acc = 0.0;
      for (int k = 0; k < dim; ++k) acc += sq.base_row(k) * col(k);
      return -double(n + 2) * acc;
    };
    E.col(0).head(dim) = fq.T.cast<Cd>();
    E(dim, 0) = tc(fq.T.cast<Cd>());
    E(dim, 1) = double(n + 2);
    for (int a = 0; a < n; ++a) {
      E.col(2 + a).head(dim) = fq.L.col(a);
      E(dim, 2 + a) = tc(fq.L.col(a));
      E.col(n + 2 + a) = E.col(2 + a).conjugate();
    }
    return E;
  };
  const double fd = 1e-5;
  std::vector<Eigen::MatrixXcd> dE(N, Eigen::MatrixXcd::Zero(N, F));
  for (int k = 0; k < dim; ++k) {  // frame fields are fiber-independent
    ChartPoint q = base;
    q(k) = base(k) + fd;
    Eigen::MatrixXcd Ep = frame_field(q);
    q(k) = base(k) - fd;
    Eigen::MatrixXcd Em = frame_field(q);
    dE[k] = (Ep - Em) / (2.0 * fd);
  }

  CoframeEval cf = m.coframe(base);
  SigmaEval sg = sigma(m, base);
  for (int s = 0; s < samples; ++s) {
    Eigen::VectorXd u = rand_vec(N), w = rand_vec(N);
    Eigen::VectorXcd wc(F);
    wc(0) = cf.theta.dot(w.head(dim));
    wc(1) = sg.row.dot(w);
    for (int a = 0; a < n; ++a) {
      Cd acc = 0.0;
      for (int k = 0; k < dim; ++k) acc += cf.theta_alpha(a, k) * w(k);
      wc(2 + a) = acc;
      wc(n + 2 + a) = std::conj(acc);
    }

    Eigen::VectorXcd via_forms = Eigen::VectorXcd::Zero(N);
    for (int I = 0; I < F; ++I)
      for (int K = 0; K < F; ++K)
        via_forms += wc(I) * eval_row(lf.omega[I * F + K], u) * lf.frame.col(K);

    Eigen::VectorXcd via_gamma = Eigen::VectorXcd::Zero(N);
    for (int k = 0; k < N; ++k) {
      Cd acc = 0.0;
      for (int jx = 0; jx < N; ++jx) acc += u(jx) * (dE[jx].row(k) * wc)(0, 0);
      via_gamma(k) = acc;
    }
    Eigen::VectorXcd wt = lf.frame * wc;
    for (int k = 0; k < N; ++k) {
      Cd acc = 0.0;
      for (int jx = 0; jx < N; ++jx)
        for (int l = 0; l < N; ++l) acc += G[k](jx, l) * u(jx) * wt(l);
      via_gamma(k) += acc;
    }
    r.christoffel_residual = std::max(
        r.christoffel_residual, (via_forms - via_gamma).cwiseAbs().maxCoeff());
  }
  return r;
}

}  // namespace crlab

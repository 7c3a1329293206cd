#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "crlab/embeddings.hpp"
#include "crlab/scalars.hpp"

namespace crlab {
namespace {

constexpr double kPi = 3.14159265358979323846;

Cd row_on(const Eigen::VectorXcd& row, const Eigen::VectorXcd& v) {
  return (row.transpose() * v).value();
}

// chart injection (x^1,y^1..x^n,y^n, last) -> zeros padded before the last
// coordinate; shared by the Heisenberg and sphere linear embeddings
CREmbedding pair_padding_embedding(ModelPtr src, ModelPtr tgt, std::string name) {
  const int n = src->n(), nhat = tgt->n();
  const int ds = 2 * n + 1, dt = 2 * nhat + 1;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(dt, ds);
  for (int i = 0; i < 2 * n; ++i) J(i, i) = 1.0;
  J(dt - 1, ds - 1) = 1.0;

  CREmbedding e;
  e.source = std::move(src);
  e.target = std::move(tgt);
  e.name = std::move(name);
  e.map = [n, nhat](const ChartPoint& p) {
    ChartPoint q = ChartPoint::Zero(2 * nhat + 1);
    q.head(2 * n) = p.head(2 * n);
    q(2 * nhat) = p(2 * n);
    return q;
  };
  e.differential = [J](const ChartPoint&) { return J; };
  e.retraction = [n, nhat](const ChartPoint& q) {
    ChartPoint p(2 * n + 1);
    p.head(2 * n) = q.head(2 * n);
    p(2 * n) = q(2 * nhat);
    return p;
  };
  return e;
}

// (z, w) -> (z^2, sqrt2 z w, w^2) on S^3 in the graph chart, w = sqrt(1-|z|^2) e^{i phi}
template <class T>
void whitney_core(const T* q, T* out) {
  cx<T> z(q[0], q[1]);
  T r = sqrt(T(1.0) - (q[0] * q[0] + q[1] * q[1]));
  cx<T> w = cx<T>(r) * cx<T>(cos(q[2]), sin(q[2]));
  cx<T> z1 = z * z;
  cx<T> z2 = cx<T>(T(std::sqrt(2.0))) * z * w;
  out[0] = z1.re;
  out[1] = z1.im;
  out[2] = z2.re;
  out[3] = z2.im;
  out[4] = T(2.0) * q[2];
}

// Unitary field sending the pushed-forward holomorphic frame into the first
// n coframe slots; built through the retraction so it extends off the image.
struct AdaptedRotation {
  CREmbedding emb;
  ModelPtr rescaled;
  std::vector<int> pivots;  // frozen completion pivots
  int n = 0, nhat = 0;

  Eigen::MatrixXcd P_at(const ChartPoint& qhat) const {
    ChartPoint s = emb.retraction(qhat);
    FrameEval fr = frame(emb.source->coframe(s));
    Eigen::MatrixXcd push = emb.differential(s).cast<Cd>() * fr.L;
    return rescaled->coframe(qhat).theta_alpha * push;
  }

  Eigen::MatrixXcd U_at(const ChartPoint& qhat) const {
    Eigen::MatrixXcd B(nhat, nhat);
    B.leftCols(n) = P_at(qhat);
    for (int j = 0; j < nhat - n; ++j)
      B.col(n + j) = Eigen::VectorXcd::Unit(nhat, pivots[j]);
    for (int j = 0; j < nhat; ++j) {
      for (int k = 0; k < j; ++k) B.col(j) -= B.col(k).dot(B.col(j)) * B.col(k);
      double nrm = B.col(j).norm();
      if (nrm < 1e-10) throw std::runtime_error("adapt_coframes: degenerate frame completion");
      B.col(j) /= nrm;
    }
    if (nhat > n) {
      Cd det = B.determinant();
      B.col(nhat - 1) *= std::conj(det) / std::abs(det);
    }
    return B.adjoint();
  }
};

std::function<UnitaryField(const ChartPoint&)> rotation_field(
    std::shared_ptr<const AdaptedRotation> rot, double fd_step) {
  return [rot, fd_step](const ChartPoint& q) {
    UnitaryField f;
    f.U = rot->U_at(q);
    const int dt = static_cast<int>(q.size());
    f.dU.resize(dt);
    for (int k = 0; k < dt; ++k) {
      ChartPoint qp = q, qm = q;
      qp[k] += fd_step;
      qm[k] -= fd_step;
      f.dU[k] = (rot->U_at(qp) - rot->U_at(qm)) / (2.0 * fd_step);
    }
    return f;
  };
}

// central derivative of a complex row field, order 2 or 4
Eigen::VectorXcd central_row(const std::function<Eigen::VectorXcd(const ChartPoint&)>& field,
                             const ChartPoint& p, int k, double step, int order) {
  ChartPoint q = p;
  auto at = [&](double off) {
    q[k] = p[k] + off;
    return field(q);
  };
  if (order >= 4)
    return (-at(2 * step) + 8.0 * at(step) - 8.0 * at(-step) + at(-2 * step)) / (12.0 * step);
  return (at(step) - at(-step)) / (2.0 * step);
}

double segment_integral(const std::function<Eigen::VectorXd(const ChartPoint&)>& row,
                        const ChartPoint& a, const ChartPoint& b, int nodes) {
  std::vector<double> xs, ws;
  gauss_legendre(nodes, xs, ws);
  Eigen::VectorXd d = b - a;
  double acc = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i)
    acc += ws[i] * row(a + xs[i] * d).dot(d);
  return acc;
}

}  // namespace

CREmbedding identity_embedding(ModelPtr m) {
  const int d = m->dim();
  CREmbedding e;
  e.source = m;
  e.target = m;
  e.name = "identity-" + m->name();
  e.map = [](const ChartPoint& p) { return p; };
  e.differential = [d](const ChartPoint&) { return Eigen::MatrixXd::Identity(d, d); };
  e.retraction = [](const ChartPoint& p) { return p; };
  return e;
}

CREmbedding heisenberg_inclusion(int n, int nhat) {
  if (nhat < n || n < 1) throw std::invalid_argument("heisenberg_inclusion: need nhat >= n >= 1");
  return pair_padding_embedding(heisenberg_model(n), heisenberg_model(nhat),
                                "heisenberg-inclusion");
}

CREmbedding linear_sphere_embedding(int n, int nhat) {
  if (nhat <= n || n < 1) throw std::invalid_argument("linear_sphere_embedding: need nhat > n >= 1");
  return pair_padding_embedding(sphere_model(n), sphere_model(nhat), "linear-sphere");
}

CREmbedding whitney_embedding() {
  CREmbedding e;
  e.source = sphere_model(1);
  e.target = sphere_model(2);
  e.name = "whitney";
  e.map = [](const ChartPoint& p) {
    double out[5];
    whitney_core(p.data(), out);
    return Eigen::Map<ChartPoint>(out, 5).eval();
  };
  e.differential = [](const ChartPoint& p) {
    Dual q[3], out[5];
    for (int k = 0; k < 3; ++k) q[k] = Dual::var(p[k], k);
    whitney_core(q, out);
    Eigen::MatrixXd J(5, 3);
    for (int i = 0; i < 5; ++i)
      for (int k = 0; k < 3; ++k) J(i, k) = out[i].d[k];
    return J;
  };
  // z = principal sqrt(z^2) is the correct branch on Re z > 0, where the
  // test probes live
  e.retraction = [](const ChartPoint& q) {
    Cd z = std::sqrt(Cd(q[0], q[1]));
    ChartPoint p(3);
    p << z.real(), z.imag(), q[4] / 2.0;
    return p;
  };
  return e;
}

double cr_residual(const CREmbedding& emb, const ChartPoint& p) {
  CoframeEval scf = emb.source->coframe(p);
  FrameEval fr = frame(scf);
  Eigen::MatrixXd J = emb.differential(p);
  CoframeEval tcf = emb.target->coframe(emb.map(p));

  Eigen::VectorXd pth = J.transpose() * tcf.theta;
  double lam = pth.dot(fr.T);
  double c1 = (pth - lam * scf.theta).cwiseAbs().maxCoeff();

  Eigen::MatrixXcd rows = tcf.theta_alpha * J.cast<Cd>();
  double c2 = (rows * fr.L.conjugate()).cwiseAbs().maxCoeff();
  return std::max(c1, c2);
}

AdaptedPair adapt_coframes(const CREmbedding& emb, const ChartPoint& p) {
  const int n = emb.source->n(), nhat = emb.target->n();
  const int ds = 2 * n + 1;

  AdaptedPair pair;
  pair.emb = emb;
  pair.base = p;
  pair.source_cf = emb.source->coframe(p);
  FrameEval fr = frame(pair.source_cf);
  Eigen::MatrixXd J = emb.differential(p);
  ChartPoint q0 = emb.map(p);

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
  if (svd.singularValues()(ds - 1) < 1e-8)
    throw std::runtime_error("adapt_coframes: pushforward rank loss");

  auto lambda_at = [&](const ChartPoint& s) {
    CoframeEval sc = emb.source->coframe(s);
    Eigen::VectorXd pth =
        emb.differential(s).transpose() * emb.target->coframe(emb.map(s)).theta;
    double lam = pth.dot(frame(sc).T);
    double res = (pth - lam * sc.theta).cwiseAbs().maxCoeff();
    return std::make_pair(lam, res);
  };
  auto [lam, res0] = lambda_at(p);
  if (res0 > 1e-8 * std::max(1.0, std::abs(lam)))
    throw std::runtime_error("adapt_coframes: contact line not preserved");
  if (lam <= 0) throw std::runtime_error("adapt_coframes: nonpositive contact scale");
  std::mt19937 gen(99);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 4; ++trial) {
    ChartPoint s(ds);
    for (int k = 0; k < ds; ++k) s[k] = p[k] + 0.01 * gauss(gen);
    if (!emb.source->contains(s)) continue;
    auto [l2, r2] = lambda_at(s);
    if (std::abs(l2 - lam) > 1e-6 * std::max(1.0, lam) ||
        r2 > 1e-6 * std::max(1.0, lam))
      throw std::runtime_error("adapt_coframes: nonconstant contact scale");
  }
  pair.lambda = lam;

  ModelPtr rescaled =
      std::abs(lam - 1.0) < 1e-12 ? emb.target : with_rescaled_contact(emb.target, 1.0 / lam);

  auto rot = std::make_shared<AdaptedRotation>();
  rot->emb = emb;
  rot->rescaled = rescaled;
  rot->n = n;
  rot->nhat = nhat;
  {
    // greedy completion pivots at the base, frozen afterwards
    Eigen::MatrixXcd C(nhat, nhat);
    C.leftCols(n) = rot->P_at(q0);
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < j; ++k) C.col(j) -= C.col(k).dot(C.col(j)) * C.col(k);
      C.col(j).normalize();
    }
    std::vector<bool> used(nhat, false);
    for (int j = 0; j < nhat - n; ++j) {
      int best = -1;
      double best_score = -1.0;
      for (int c = 0; c < nhat; ++c) {
        if (used[c]) continue;
        Eigen::VectorXcd v = Eigen::VectorXcd::Unit(nhat, c);
        for (int k = 0; k < n + j; ++k) v -= C.col(k).dot(v) * C.col(k);
        if (v.norm() > best_score) {
          best_score = v.norm();
          best = c;
        }
      }
      Eigen::VectorXcd v = Eigen::VectorXcd::Unit(nhat, best);
      for (int k = 0; k < n + j; ++k) v -= C.col(k).dot(v) * C.col(k);
      v.normalize();
      C.col(n + j) = v;
      used[best] = true;
      rot->pivots.push_back(best);
    }
  }

  // when the construction is exactly trivial at the base (and stays so at a
  // jittered image point) the undecorated target is already adapted
  bool trivial = (rot->U_at(q0) - Eigen::MatrixXcd::Identity(nhat, nhat))
                     .cwiseAbs()
                     .maxCoeff() < 1e-12;
  if (trivial) {
    ChartPoint s2 = p;
    s2[0] += 0.05;
    if (emb.source->contains(s2)) {
      trivial = (rot->U_at(emb.map(s2)) - Eigen::MatrixXcd::Identity(nhat, nhat))
                    .cwiseAbs()
                    .maxCoeff() < 1e-10;
    }
  }
  pair.target_adapted = trivial ? rescaled
                                : with_rotated_coframe(rescaled, rotation_field(rot, 1e-5));

  pair.target_cf = pair.target_adapted->coframe(q0);
  Eigen::VectorXd pth = J.transpose() * pair.target_cf.theta;
  pair.theta_residual = (pth - pair.source_cf.theta).cwiseAbs().maxCoeff();
  Eigen::MatrixXcd rows = pair.target_cf.theta_alpha * J.cast<Cd>();
  pair.holo_residual =
      (rows.topRows(n) - pair.source_cf.theta_alpha).cwiseAbs().maxCoeff();
  pair.normal_residual =
      nhat > n ? rows.bottomRows(nhat - n).cwiseAbs().maxCoeff() : 0.0;
  if (std::max({pair.theta_residual, pair.holo_residual, pair.normal_residual}) > 1e-7)
    throw std::runtime_error("adapt_coframes: pullback residuals too large");
  return pair;
}

double SecondFundamentalForm::norm() const {
  double s = 0.0;
  for (const auto& blk : omega) s += blk.squaredNorm();
  return std::sqrt(s);
}

SecondFundamentalForm second_fundamental_form(const AdaptedPair& pair,
                                              const ChartPoint& p) {
  const ModelManifold& ms = *pair.emb.source;
  const ModelManifold& mh = *pair.target_adapted;
  const int n = ms.n(), nhat = mh.n();

  SecondFundamentalForm sff;
  sff.n = n;
  sff.nhat = nhat;
  if (nhat == n) return sff;

  ChartPoint q = pair.emb.map(p);
  Eigen::MatrixXcd Jc = pair.emb.differential(p).cast<Cd>();
  FrameEval fr = frame(ms.coframe(p));
  ConnectionEval conn = solve_connection(mh, q);
  CoframeEval tcf = mh.coframe(q);
  Eigen::VectorXcd Tc = fr.T.cast<Cd>();

  sff.omega.assign(nhat - n, Eigen::MatrixXcd::Zero(n, n));
  for (int b = n; b < nhat; ++b) {
    for (int al = 0; al < n; ++al) {
      Eigen::VectorXcd pull = Jc.transpose() * conn.omega_row(tcf, al, b);
      for (int be = 0; be < n; ++be) {
        sff.omega[b - n](al, be) = row_on(pull, fr.L.col(be));
        sff.antiholo_component = std::max(
            sff.antiholo_component, std::abs(row_on(pull, fr.L.col(be).conjugate())));
      }
      sff.theta_component = std::max(sff.theta_component, std::abs(row_on(pull, Tc)));
    }
    Eigen::VectorXcd tpull = Jc.transpose() * conn.tau_row(tcf, b);
    sff.torsion_residual = std::max(sff.torsion_residual, tpull.cwiseAbs().maxCoeff());
  }
  for (const auto& blk : sff.omega)
    sff.symmetry_defect =
        std::max(sff.symmetry_defect,
                 (blk - blk.transpose()).cwiseAbs().maxCoeff());
  return sff;
}

SecondFundamentalForm second_fundamental_form(const CREmbedding& emb,
                                              const ChartPoint& p) {
  return second_fundamental_form(adapt_coframes(emb, p), p);
}

LiftConditionResult lift_condition(const AdaptedPair& pair, const ChartPoint& p,
                                   double tol) {
  const int n = pair.emb.source->n();
  ChernMoserEval cs = chern_moser(*pair.emb.source, p);
  ChernMoserEval ct = chern_moser(*pair.target_adapted, pair.emb.map(p));

  LiftConditionResult r;
  r.C = ct.D.topLeftCorner(n, n) - cs.D;
  r.F = ct.E.head(n) - cs.E;
  r.c_norm = r.C.norm();
  r.lift_exists = r.c_norm < tol;
  r.sphere_target = pair.emb.target->name().rfind("sphere", 0) == 0;
  if (r.sphere_target) {
    SecondFundamentalForm sff = second_fundamental_form(pair, p);
    Eigen::MatrixXcd t1 = Eigen::MatrixXcd::Zero(n, n);
    for (const auto& blk : sff.omega) t1 += blk.transpose() * blk.conjugate();
    double w2 = t1.trace().real();
    r.trace_residual =
        (t1 - w2 / (2.0 * (n + 1)) * Eigen::MatrixXcd::Identity(n, n)).norm();
    r.trace_holds = r.trace_residual < tol;
    r.verdicts_agree = r.lift_exists == r.trace_holds;
  }
  return r;
}

LiftConditionResult lift_condition(const CREmbedding& emb, const ChartPoint& p,
                                   double tol) {
  return lift_condition(adapt_coframes(emb, p), p, tol);
}

TraceLemmaResult trace_lemma_check(const std::vector<Eigen::MatrixXcd>& omega,
                                   int n, double tol) {
  TraceLemmaResult r;
  double n2 = 0.0;
  for (const auto& blk : omega) {
    if (blk.rows() != n || blk.cols() != n)
      throw std::invalid_argument("trace_lemma_check: block size mismatch");
    n2 += blk.squaredNorm();
  }
  r.omega_norm = std::sqrt(n2);
  for (const auto& blk : omega)
    if ((blk - blk.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, r.omega_norm))
      throw std::invalid_argument("trace_lemma_check: omega must be symmetric");

  Eigen::MatrixXcd t1 = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& blk : omega) t1 += blk.transpose() * blk.conjugate();
  r.residual =
      (t1 - n2 / (2.0 * (n + 1)) * Eigen::MatrixXcd::Identity(n, n)).norm();
  r.holds = r.residual < tol * std::max(1.0, n2);
  return r;
}

ChainPreservationResult chain_preservation_test(const CREmbedding& emb,
                                                const ChainState& initial,
                                                double t_span, double step,
                                                int eval_stride, int cm_order) {
  ChainPreservationResult r;
  ChainTrajectory tr = integrate_chain(*emb.source, initial, t_span, step, 1e3, cm_order);
  r.status = tr.status;
  r.residual = std::numeric_limits<double>::quiet_NaN();
  if (tr.status != IntegrationStatus::Completed) return r;

  std::vector<CurvePoint> src = trajectory_curve(*emb.source, tr);
  std::vector<CurvePoint> mapped(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    ChartPoint q = emb.map(src[i].point);
    if (!emb.target->contains(q)) {
      r.status = IntegrationStatus::DomainExit;
      return r;
    }
    mapped[i] = {src[i].t, q, emb.differential(src[i].point) * src[i].tangent};
  }
  r.residual = chain_residual(*emb.target, mapped, cm_order, eval_stride);
  return r;
}

double chain_preservation_sweep(const CREmbedding& emb, const ChartPoint& base,
                                const std::vector<double>& radii, int phases,
                                double t_span, double step, int eval_stride,
                                int cm_order) {
  const int n = emb.source->n();
  double worst = 0.0;
  int dir = 0;
  for (double rad : radii)
    for (int k = 0; k < phases; ++k) {
      Eigen::VectorXcd a = Eigen::VectorXcd::Zero(n);
      double ph = 2.0 * kPi * k / phases;
      a((dir++) % n) = rad * Cd(std::cos(ph), std::sin(ph));
      ChainPreservationResult res =
          chain_preservation_test(emb, {base, a}, t_span, step, eval_stride, cm_order);
      if (res.status != IntegrationStatus::Completed)
        throw std::runtime_error("chain_preservation_sweep: trajectory left the chart");
      worst = std::max(worst, res.residual);
    }
  return worst;
}

SffComparisonReport sff_comparison_report(const CREmbedding& emb,
                                          const ChartPoint& p, double tol) {
  SffComparisonReport rep;
  ChartPoint q = emb.map(p);

  // constant-scalar-curvature guard on the target
  Eigen::MatrixXcd ric;
  double r0 = 0.0, r1 = 0.0;
  ricci_scalar(*emb.target, q, ric, r0);
  ChartPoint q2 = q;
  q2[q.size() - 1] += 0.05;  // always stays in both model charts
  ricci_scalar(*emb.target, q2, ric, r1);
  if (std::abs(r1 - r0) > 1e-4 * std::max(1.0, std::abs(r0))) {
    rep.verdict = "not evaluated";
    return rep;
  }
  rep.evaluated = true;

  AdaptedPair pair = adapt_coframes(emb, p);
  const int n = emb.source->n(), nhat = emb.target->n();
  if (nhat == n) {
    rep.verdict = "F totally geodesic";  // empty normal bundle
    return rep;
  }
  rep.sff_norm = second_fundamental_form(pair, p).norm();
  CurvatureEval cv = curvature(*pair.target_adapted, q);
  rep.mixed_ricci_norm = cv.ricci.block(0, n, n, nhat - n).norm();
  rep.verdict = rep.sff_norm < tol ? "F totally geodesic" : "F not totally geodesic";
  return rep;
}

double covariant_derivative_sff(const AdaptedPair& pair, const ChartPoint& p,
                                double omega_scale, double* curvature_term_norm,
                                double fd_step, int fd_order) {
  const ModelManifold& ms = *pair.emb.source;
  const ModelManifold& mt = *pair.target_adapted;
  const int n = ms.n(), nhat = mt.n(), ds = ms.dim();
  const int nb = nhat - n;
  if (nb == 0) {
    if (curvature_term_norm) *curvature_term_norm = 0.0;
    return 0.0;
  }
  auto idx = [n](int a, int al, int ga) { return (a * n + al) * n + ga; };

  auto sff_flat = [&](const ChartPoint& s) {
    SecondFundamentalForm f = second_fundamental_form(pair, s);
    Eigen::VectorXcd flat(nb * n * n);
    for (int a = 0; a < nb; ++a)
      for (int al = 0; al < n; ++al)
        for (int ga = 0; ga < n; ++ga) flat(idx(a, al, ga)) = f.omega[a](al, ga);
    return Eigen::VectorXcd(omega_scale * flat);
  };
  Eigen::VectorXcd f0 = sff_flat(p);
  std::vector<Eigen::VectorXcd> df(ds);
  for (int k = 0; k < ds; ++k) df[k] = central_row(sff_flat, p, k, fd_step, fd_order);

  FrameEval fr = frame(ms.coframe(p));
  ConnectionEval cs = solve_connection(ms, p);
  ChartPoint q = pair.emb.map(p);
  Eigen::MatrixXcd Jc = pair.emb.differential(p).cast<Cd>();
  ConnectionEval ct = solve_connection(mt, q);
  CoframeEval tcf = mt.coframe(q);
  CurvatureEval cv = curvature(mt, q, fd_step, fd_order);

  // normal-normal connection pulled back and evaluated on Lbar_nu
  std::vector<Eigen::VectorXcd> wn(nb * nb, Eigen::VectorXcd::Zero(n));
  for (int b = 0; b < nb; ++b)
    for (int a = 0; a < nb; ++a) {
      Eigen::VectorXcd pull = Jc.transpose() * ct.omega_row(tcf, n + b, n + a);
      for (int nu = 0; nu < n; ++nu)
        wn[b * nb + a](nu) = row_on(pull, fr.L.col(nu).conjugate());
    }

  double worst = 0.0, ctn = 0.0;
  for (int a = 0; a < nb; ++a)
    for (int al = 0; al < n; ++al)
      for (int ga = 0; ga < n; ++ga)
        for (int nu = 0; nu < n; ++nu) {
          Cd dterm = 0.0;
          for (int k = 0; k < ds; ++k)
            dterm += df[k](idx(a, al, ga)) * std::conj(fr.L(k, nu));
          Cd lhs = dterm;
          for (int mu = 0; mu < n; ++mu)
            lhs -= f0(idx(a, mu, ga)) * cs.omega_Hb[nu](al, mu) +
                   f0(idx(a, al, mu)) * cs.omega_Hb[nu](ga, mu);
          for (int b = 0; b < nb; ++b)
            lhs += f0(idx(b, al, ga)) * wn[b * nb + a](nu);
          Cd rterm = cv.blocks[al * nhat + (n + a)](ga, nu);
          worst = std::max(worst, std::abs(lhs + rterm));
          ctn = std::max(ctn, std::abs(rterm));
        }
  if (curvature_term_norm) *curvature_term_norm = ctn;
  return worst;
}

Eigen::VectorXd lift_form_row(const AdaptedPair& pair, const ChartPoint& p,
                              double step, int order) {
  const int nhat = pair.emb.target->n();
  SigmaEval ss = sigma(*pair.emb.source, p, step, order);
  SigmaEval st = sigma(*pair.target_adapted, pair.emb.map(p), step, order);
  Eigen::VectorXd pull = pair.emb.differential(p).transpose() * st.base_row;
  return (nhat + 2.0) * (ss.base_row - pull);
}

IsometricLiftResult isometric_lift(const AdaptedPair& pair,
                                   const std::vector<ChartPoint>& base_path,
                                   const std::vector<std::vector<ChartPoint>>& loops,
                                   double s0, int nodes_per_edge) {
  const int n = pair.emb.source->n(), nhat = pair.emb.target->n();
  IsometricLiftResult r;
  r.dt_coefficient = (nhat + 2.0) / (n + 2.0);

  auto row = [&](const ChartPoint& x) { return lift_form_row(pair, x); };
  r.s.push_back(s0);
  for (std::size_t i = 0; i + 1 < base_path.size(); ++i)
    r.s.push_back(r.s.back() +
                  segment_integral(row, base_path[i], base_path[i + 1], nodes_per_edge));

  for (const auto& loop : loops) {
    double d = loop_integral(row, loop, nodes_per_edge);
    r.loop_defects.push_back(d);
    r.max_loop_defect = std::max(r.max_loop_defect, std::abs(d));
  }
  return r;
}

double lift_isometry_residual(const AdaptedPair& pair, const ChartPoint& p,
                              int samples, unsigned seed, double step, int order) {
  const int n = pair.emb.source->n(), nhat = pair.emb.target->n();
  const int ds = 2 * n + 1, dt = 2 * nhat + 1;

  Eigen::MatrixXd dF = Eigen::MatrixXd::Zero(dt + 1, ds + 1);
  dF.topLeftCorner(dt, ds) = pair.emb.differential(p);
  dF.block(dt, 0, 1, ds) = lift_form_row(pair, p, step, order).transpose();
  dF(dt, ds) = (nhat + 2.0) / (n + 2.0);

  Eigen::MatrixXd hs = metric(*pair.emb.source, p, step, order).h;
  Eigen::MatrixXd ht = metric(*pair.target_adapted, pair.emb.map(p), step, order).h;
  Eigen::MatrixXd diff = dF.transpose() * ht * dF - hs;

  std::mt19937 gen(seed);
  std::normal_distribution<double> gauss;
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    Eigen::VectorXd u(ds + 1), v(ds + 1);
    for (int k = 0; k <= ds; ++k) {
      u[k] = gauss(gen);
      v[k] = gauss(gen);
    }
    u.normalize();
    v.normalize();
    worst = std::max(worst, std::abs(u.dot(diff * v)));
  }
  return worst;
}

}  // namespace crlab

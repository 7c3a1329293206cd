#include "crlab/connection.hpp"

#include <map>
#include <mutex>

namespace crlab {

namespace {

// Complex unknown layout: [Gamma0 (n^2) | GammaH (n^3) | GammaHb (n^3) | A (n^2)].
// Gamma0(a,b) at a*n+b; GammaH[m](a,b) at n^2 + (m*n+a)*n + b; A(b,m) at 2n^3+n^2+b*n+m.
struct SystemIndex {
  int n;
  int g0(int a, int b) const { return a * n + b; }
  int gh(int m, int a, int b) const { return n * n + (m * n + a) * n + b; }
  int ghb(int m, int a, int b) const { return n * n + n * n * n + (m * n + a) * n + b; }
  int av(int b, int m) const { return n * n + 2 * n * n * n + b * n + m; }
  int total() const { return 2 * n * n + 2 * n * n * n; }
};

// Real 2x-expansion: unknown k -> x[2k] = Re, x[2k+1] = Im.
struct RealSystem {
  Eigen::MatrixXd M;
  int row = 0;
  void add(int r, int k, Cd c, bool conjugated) {
    M(r, 2 * k) += c.real();
    M(r, 2 * k + 1) += conjugated ? c.imag() : -c.imag();
    M(r + 1, 2 * k) += c.imag();
    M(r + 1, 2 * k + 1) += conjugated ? -c.real() : c.real();
  }
};

struct Factorization {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr;
  Eigen::MatrixXd M;
  double sigma_min;
  int rows, cols;
};

// Equations, in fixed order (complex rows; constraint rows appended):
//  (c)  -Gamma0(m,b)                          = c_theta-m^b
//  (d)   A(b,m)                               = c_theta-mbar^b
//  (a)   GammaH[v](m,b) - GammaH[m](v,b)      = c_mv^b          (m < v)
//  (b)   GammaHb[v](m,b)                      = c_m-vbar^b
//  (e)   Gamma0(a,b) + conj(Gamma0(b,a))      = 0               (a <= b)
//  (f)   GammaH[m](a,b) + conj(GammaHb[m](b,a)) = 0
const Factorization& system_for(int n) {
  static std::map<int, Factorization> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  SystemIndex ix{n};
  int crows = 0;
  crows += n * n;                // (c)
  crows += n * n;                // (d)
  crows += n * n * (n - 1) / 2;  // (a)
  crows += n * n * n;            // (b)
  crows += n * (n + 1) / 2;      // (e)
  crows += n * n * n;            // (f)
  RealSystem rs;
  rs.M = Eigen::MatrixXd::Zero(2 * crows, 2 * ix.total());
  int r = 0;
  for (int b = 0; b < n; ++b) {
    for (int m = 0; m < n; ++m) {  // (c)
      rs.add(r, ix.g0(m, b), Cd(-1, 0), false);
      r += 2;
    }
    for (int m = 0; m < n; ++m) {  // (d)
      rs.add(r, ix.av(b, m), Cd(1, 0), false);
      r += 2;
    }
    for (int m = 0; m < n; ++m)  // (a)
      for (int v = m + 1; v < n; ++v) {
        rs.add(r, ix.gh(v, m, b), Cd(1, 0), false);
        rs.add(r, ix.gh(m, v, b), Cd(-1, 0), false);
        r += 2;
      }
    for (int m = 0; m < n; ++m)  // (b)
      for (int v = 0; v < n; ++v) {
        rs.add(r, ix.ghb(v, m, b), Cd(1, 0), false);
        r += 2;
      }
  }
  for (int a = 0; a < n; ++a)  // (e)
    for (int b = a; b < n; ++b) {
      rs.add(r, ix.g0(a, b), Cd(1, 0), false);
      rs.add(r, ix.g0(b, a), Cd(1, 0), true);
      r += 2;
    }
  for (int m = 0; m < n; ++m)  // (f)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        rs.add(r, ix.gh(m, a, b), Cd(1, 0), false);
        rs.add(r, ix.ghb(m, b, a), Cd(1, 0), true);
        r += 2;
      }

  Factorization f;
  f.M = rs.M;
  f.rows = rs.M.rows();
  f.cols = rs.M.cols();
  f.qr.compute(rs.M);
  if (f.qr.rank() < f.cols)
    throw std::runtime_error("solve_connection: rank-deficient structure system");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(rs.M);
  f.sigma_min = svd.singularValues().tail(1)(0);
  return cache.emplace(n, std::move(f)).first->second;
}

}  // namespace

ConnectionEval solve_connection_from_jet(const CoframeJet& j) {
  const int n = j.cf.theta_alpha.rows();
  SystemIndex ix{n};
  const Factorization& fac = system_for(n);
  FrameEval fr = frame(j.cf);

  // sectors of d theta^b
  std::vector<Sectors2> sec(n);
  for (int b = 0; b < n; ++b) {
    Eigen::MatrixXcd da = j.alpha_d[b].transpose() - j.alpha_d[b];
    sec[b] = decompose2(da, fr);
  }

  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(fac.rows);
  int r = 0;
  auto put = [&rhs, &r](Cd c) {
    rhs[r] = c.real();
    rhs[r + 1] = c.imag();
    r += 2;
  };
  for (int b = 0; b < n; ++b) {
    for (int m = 0; m < n; ++m) put(sec[b].th[m]);
    for (int m = 0; m < n; ++m) put(sec[b].thbar[m]);
    for (int m = 0; m < n; ++m)
      for (int v = m + 1; v < n; ++v) put(sec[b].hh(m, v));
    for (int m = 0; m < n; ++m)
      for (int v = 0; v < n; ++v) put(sec[b].hhbar(m, v));
  }
  // constraint rows have zero right-hand side
  Eigen::VectorXd x = fac.qr.solve(rhs);

  ConnectionEval ce;
  ce.omega_T = Eigen::MatrixXcd(n, n);
  ce.omega_H.assign(n, Eigen::MatrixXcd(n, n));
  ce.omega_Hb.assign(n, Eigen::MatrixXcd(n, n));
  ce.A = Eigen::MatrixXcd(n, n);
  auto get = [&x](int k) { return Cd(x[2 * k], x[2 * k + 1]); };
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      ce.omega_T(a, b) = get(ix.g0(a, b));
      ce.A(a, b) = get(ix.av(a, b));
      for (int m = 0; m < n; ++m) {
        ce.omega_H[m](a, b) = get(ix.gh(m, a, b));
        ce.omega_Hb[m](a, b) = get(ix.ghb(m, a, b));
      }
    }
  ce.ls_residual = (fac.M * x - rhs).norm();
  ce.sigma_min = fac.sigma_min;

  // full reconstruction residual of d theta^b, all sectors (includes the
  // theta^mbar ^ theta^vbar sector that the solve excludes)
  double worst = 0.0;
  const Eigen::VectorXcd th = j.cf.theta.cast<Cd>();
  for (int b = 0; b < n; ++b) {
    Eigen::MatrixXcd rec =
        Eigen::MatrixXcd::Zero(j.cf.theta.size(), j.cf.theta.size());
    for (int a = 0; a < n; ++a)
      rec += wedge11(j.cf.theta_alpha.row(a), ce.omega_row(j.cf, a, b));
    rec += wedge11(th, ce.tau_row(j.cf, b));
    Eigen::MatrixXcd da = j.alpha_d[b].transpose() - j.alpha_d[b];
    worst = std::max(worst, (da - rec).cwiseAbs().maxCoeff());
  }
  ce.residual = worst;
  return ce;
}

ConnectionEval solve_connection(const ModelManifold& m, const ChartPoint& p) {
  if (!m.contains(p)) throw std::runtime_error("solve_connection: point outside chart");
  return solve_connection_from_jet(m.jet(p));
}

Eigen::VectorXcd ConnectionEval::omega_row(const CoframeEval& cf, int a, int b) const {
  Eigen::VectorXcd row = omega_T(a, b) * cf.theta.cast<Cd>();
  const int n = cf.theta_alpha.rows();
  for (int m = 0; m < n; ++m)
    row += omega_H[m](a, b) * cf.theta_alpha.row(m).transpose() +
           omega_Hb[m](a, b) * cf.theta_alpha.row(m).conjugate().transpose();
  return row;
}

Eigen::VectorXcd ConnectionEval::tau_row(const CoframeEval& cf, int b) const {
  const int n = cf.theta_alpha.rows();
  Eigen::VectorXcd row = Eigen::VectorXcd::Zero(cf.theta.size());
  for (int m = 0; m < n; ++m)
    row += A(b, m) * cf.theta_alpha.row(m).conjugate().transpose();
  return row;
}

Cd ConnectionEval::omega_on(int a, int b, Cd thv, const Eigen::VectorXcd& av) const {
  Cd s = omega_T(a, b) * thv;
  const int n = A.rows();
  for (int m = 0; m < n; ++m)
    s += omega_H[m](a, b) * av[m] + omega_Hb[m](a, b) * std::conj(av[m]);
  return s;
}

Cd ConnectionEval::tau_on(int b, const Eigen::VectorXcd& av) const {
  Cd s = 0;
  const int n = A.rows();
  for (int m = 0; m < n; ++m) s += A(b, m) * std::conj(av[m]);
  return s;
}

FormEval exterior_derivative(const std::function<FormEval(const ChartPoint&)>& field,
                             const ChartPoint& p, double step, int order) {
  FormEval at = field(p);
  const int D = p.size();
  FormEval out;
  out.dim = D;
  // partials of every coefficient: stencil per coordinate
  auto stencil = [&](int k, auto&& extract) {
    // returns d/dx_k of the extracted coefficient array (as vector of Cd)
    ChartPoint q = p;
    auto eval = [&](double off) {
      q[k] = p[k] + off;
      return extract(field(q));
    };
    std::vector<Cd> d;
    if (order == 4) {
      auto f1 = eval(step), f2 = eval(-step), f3 = eval(2 * step), f4 = eval(-2 * step);
      d.resize(f1.size());
      for (std::size_t i = 0; i < d.size(); ++i)
        d[i] = (8.0 * (f1[i] - f2[i]) - (f3[i] - f4[i])) / (12.0 * step);
    } else {
      auto f1 = eval(step), f2 = eval(-step);
      d.resize(f1.size());
      for (std::size_t i = 0; i < d.size(); ++i) d[i] = (f1[i] - f2[i]) / (2.0 * step);
    }
    return d;
  };

  if (at.degree == 1) {
    out.degree = 2;
    out.f2 = Eigen::MatrixXcd::Zero(D, D);
    std::vector<std::vector<Cd>> df(D);  // df[k][i] = d_k f_i
    for (int k = 0; k < D; ++k)
      df[k] = stencil(k, [D](const FormEval& f) {
        std::vector<Cd> v(D);
        for (int i = 0; i < D; ++i) v[i] = f.f1[i];
        return v;
      });
    for (int k = 0; k < D; ++k)
      for (int i = 0; i < D; ++i) out.f2(k, i) = df[k][i] - df[i][k];
    return out;
  }
  if (at.degree == 2) {
    out.degree = 3;
    out.f3.assign(D * D * D, Cd(0));
    std::vector<std::vector<Cd>> df(D);  // df[k][i*D+j] = d_k F_ij
    for (int k = 0; k < D; ++k)
      df[k] = stencil(k, [D](const FormEval& f) {
        std::vector<Cd> v(D * D);
        for (int i = 0; i < D; ++i)
          for (int j = 0; j < D; ++j) v[i * D + j] = f.f2(i, j);
        return v;
      });
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j)
        for (int k = 0; k < D; ++k)
          out.f3[(i * D + j) * D + k] =
              df[i][j * D + k] - df[j][i * D + k] + df[k][i * D + j];
    return out;
  }
  throw std::invalid_argument("exterior_derivative: unsupported input degree");
}

}  // namespace crlab

#include "crlab/geometry.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace crlab {

Eigen::MatrixXcd wedge11(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  Eigen::MatrixXcd m = a * b.transpose();
  return m - m.transpose().eval();
}

Sectors2 decompose2(const Eigen::MatrixXcd& f2, const FrameEval& fr) {
  const int n = fr.L.cols();
  Sectors2 s;
  s.hh = Eigen::MatrixXcd::Zero(n, n);
  s.hhbar = Eigen::MatrixXcd::Zero(n, n);
  s.hbhb = Eigen::MatrixXcd::Zero(n, n);
  s.th = Eigen::VectorXcd::Zero(n);
  s.thbar = Eigen::VectorXcd::Zero(n);
  Eigen::VectorXcd Tc = fr.T.cast<Cd>();
  for (int m = 0; m < n; ++m) {
    s.th[m] = form2_apply(f2, Tc, fr.L.col(m));
    s.thbar[m] = form2_apply(f2, Tc, fr.L.col(m).conjugate());
    for (int v = 0; v < n; ++v) {
      s.hh(m, v) = form2_apply(f2, fr.L.col(m), fr.L.col(v));
      s.hhbar(m, v) = form2_apply(f2, fr.L.col(m), fr.L.col(v).conjugate());
      s.hbhb(m, v) = form2_apply(f2, fr.L.col(m).conjugate(), fr.L.col(v).conjugate());
    }
  }
  return s;
}

Eigen::MatrixXcd recompose2(const Sectors2& s, const CoframeEval& cf) {
  const int n = cf.theta_alpha.rows();
  const int D = cf.theta.size();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(D, D);
  Eigen::VectorXcd th = cf.theta.cast<Cd>();
  for (int m = 0; m < n; ++m) {
    Eigen::VectorXcd am = cf.theta_alpha.row(m);
    out += s.th[m] * wedge11(th, am) + s.thbar[m] * wedge11(th, am.conjugate());
    for (int v = 0; v < n; ++v) {
      Eigen::VectorXcd av = cf.theta_alpha.row(v);
      out += s.hhbar(m, v) * wedge11(am, av.conjugate());
      if (m < v) {
        out += s.hh(m, v) * wedge11(am, av);
        out += s.hbhb(m, v) * wedge11(am.conjugate(), av.conjugate());
      }
    }
  }
  return out;
}

void gauss_legendre(int k, std::vector<double>& nodes, std::vector<double>& weights) {
  static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
  auto it = cache.find(k);
  if (it == cache.end()) {
    std::vector<double> x(k), w(k);
    for (int i = 0; i < k; ++i) {
      double t = std::cos(M_PI * (i + 0.75) / (k + 0.5));
      for (int iter = 0; iter < 100; ++iter) {
        // Legendre P_k(t) and derivative by recurrence
        double p0 = 1.0, p1 = t;
        for (int j = 2; j <= k; ++j) {
          double p2 = ((2 * j - 1) * t * p1 - (j - 1) * p0) / j;
          p0 = p1;
          p1 = p2;
        }
        double dp = k * (t * p1 - p0) / (t * t - 1.0);
        double dt = p1 / dp;
        t -= dt;
        if (std::abs(dt) < 1e-15) break;
      }
      double p0 = 1.0, p1 = t;
      for (int j = 2; j <= k; ++j) {
        double p2 = ((2 * j - 1) * t * p1 - (j - 1) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      double dp = k * (t * p1 - p0) / (t * t - 1.0);
      x[i] = 0.5 * (t + 1.0);
      w[i] = 1.0 / ((1.0 - t * t) * dp * dp);
    }
    it = cache.emplace(k, std::make_pair(std::move(x), std::move(w))).first;
  }
  nodes = it->second.first;
  weights = it->second.second;
}

double loop_integral(const std::function<Eigen::VectorXd(const ChartPoint&)>& form_row,
                     const std::vector<ChartPoint>& corners, int nodes_per_edge) {
  if (corners.size() < 3) throw std::invalid_argument("loop_integral: need >= 3 corners");
  std::vector<double> xs, ws;
  gauss_legendre(nodes_per_edge, xs, ws);
  double total = 0.0;
  for (std::size_t e = 0; e < corners.size(); ++e) {
    const ChartPoint& A = corners[e];
    const ChartPoint& B = corners[(e + 1) % corners.size()];
    Eigen::VectorXd d = B - A;
    double edge = 0.0;
    for (int q = 0; q < nodes_per_edge; ++q)
      edge += ws[q] * form_row(A + xs[q] * d).dot(d);
    total += edge;
  }
  return total;
}

std::vector<ChartPoint> rectangle_loop(const ChartPoint& p, const Eigen::VectorXd& u,
                                       const Eigen::VectorXd& v, double side) {
  const double h = 0.5 * side;
  return {p + h * u + h * v, p - h * u + h * v, p - h * u - h * v, p + h * u - h * v};
}

double affine_plane_deviation(const std::vector<Eigen::VectorXd>& pts) {
  if (pts.size() < 4) throw std::invalid_argument("affine_plane_deviation: need >= 4 points");
  const int m = pts[0].size();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(m);
  for (const auto& p : pts) mean += p;
  mean /= double(pts.size());
  Eigen::MatrixXd X(pts.size(), m);
  for (std::size_t i = 0; i < pts.size(); ++i) X.row(i) = (pts[i] - mean).transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(X, Eigen::ComputeThinV);
  Eigen::MatrixXd V = svd.matrixV();  // columns sorted by singular value
  double worst = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double r2 = 0.0;
    for (int c = 2; c < V.cols(); ++c) {
      double t = X.row(i).dot(V.col(c));
      r2 += t * t;
    }
    worst = std::max(worst, std::sqrt(r2));
  }
  return worst;
}

}  // namespace crlab

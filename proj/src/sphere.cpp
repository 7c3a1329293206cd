#include <stdexcept>

#include "crlab/model.hpp"
#include "crlab/normalize.hpp"

namespace crlab {

// S^{2n+1} in the graph chart psi(x, y, phi) = (z^1..z^n, sqrt(1-|z|^2) e^{i phi}),
// coordinates (x^1, y^1, ..., x^n, y^n, phi), domain |z|^2 <= 0.9, |phi| <= 8.
// theta = (i/2)(dbar rho - d rho)|_S = sum Im(Zbar_j dZ_j) for rho = |Z|^2 - 1.
// theta^alpha comes from normalize_core applied to eta^alpha = psi^* dZ^alpha.
namespace {

constexpr double kMaxZ2 = 0.9;
constexpr double kMaxPhi = 8.0;

// Ambient map and its analytic Jacobian over a generic scalar.
template <class T>
void ambient_jet(int n, const T* q, cx<T>* Z, CMat<T>& J) {
  T z2(0.0);
  for (int a = 0; a < n; ++a) {
    Z[a] = cx<T>(q[2 * a], q[2 * a + 1]);
    z2 += q[2 * a] * q[2 * a] + q[2 * a + 1] * q[2 * a + 1];
  }
  T r = sqrt(T(1.0) - z2);
  cx<T> e(cos(q[2 * n]), sin(q[2 * n]));
  Z[n] = cx<T>(r) * e;

  const int D = 2 * n + 1;
  J = CMat<T>(n + 1, D);
  for (int a = 0; a < n; ++a) {
    J(a, 2 * a) = cx<T>(T(1.0));
    J(a, 2 * a + 1) = cx<T>(T(0.0), T(1.0));
  }
  cx<T> c = e / r;  // e^{i phi} / r
  for (int b = 0; b < n; ++b) {
    J(n, 2 * b) = cx<T>(T(-1.0) * q[2 * b]) * c;
    J(n, 2 * b + 1) = cx<T>(T(-1.0) * q[2 * b + 1]) * c;
  }
  J(n, 2 * n) = iu(Z[n]);
}

template <class T>
void sphere_coframe_core(int n, const T* q, std::array<T, kMaxDim>& theta_row,
                         CMat<T>& alpha_rows) {
  const int D = 2 * n + 1;
  cx<T> Z[kMaxDim];
  CMat<T> J;
  ambient_jet(n, q, Z, J);

  for (int i = 0; i < D; ++i) {
    T s(0.0);
    for (int j = 0; j <= n; ++j) s += (conj(Z[j]) * J(j, i)).im;
    theta_row[i] = s;
  }

  // dtheta_{ik} = 2 sum_j Im(conj(J_{ji}) J_{jk})
  std::array<T, kMaxDim * kMaxDim> dth{};
  for (int i = 0; i < D; ++i)
    for (int k = 0; k < D; ++k) {
      T s(0.0);
      for (int j = 0; j <= n; ++j) s += (conj(J(j, i)) * J(j, k)).im;
      dth[i * D + k] = T(2.0) * s;
    }

  CMat<T> eta(n, D);
  for (int a = 0; a < n; ++a)
    for (int i = 0; i < D; ++i) eta(a, i) = J(a, i);

  alpha_rows = normalize_core(n, theta_row, eta, dth).alpha;
}

class SphereModel final : public ModelManifold {
 public:
  explicit SphereModel(int n) : n_(n) {}
  int n() const override { return n_; }
  std::string name() const override { return "sphere-" + std::to_string(n_); }

  bool contains(const ChartPoint& p) const override {
    if (p.size() != dim()) return false;
    double z2 = 0.0;
    for (int a = 0; a < 2 * n_; ++a) z2 += p[a] * p[a];
    return z2 <= kMaxZ2 && std::abs(p[2 * n_]) <= kMaxPhi;
  }

  CoframeEval coframe(const ChartPoint& p) const override {
    const int D = dim();
    std::array<double, kMaxDim> th{};
    CMat<double> alpha;
    sphere_coframe_core(n_, p.data(), th, alpha);
    CoframeEval cf;
    cf.theta = Eigen::VectorXd(D);
    for (int i = 0; i < D; ++i) cf.theta[i] = th[i];
    cf.theta_alpha = Eigen::MatrixXcd(n_, D);
    for (int a = 0; a < n_; ++a)
      for (int i = 0; i < D; ++i) cf.theta_alpha(a, i) = Cd(alpha(a, i).re, alpha(a, i).im);
    cf.levi = Eigen::MatrixXcd::Identity(n_, n_);
    return cf;
  }

  CoframeJet jet(const ChartPoint& p) const override {
    const int D = dim();
    std::array<Dual, kMaxDim> q;
    for (int i = 0; i < D; ++i) q[i] = Dual::var(p[i], i);
    std::array<Dual, kMaxDim> th{};
    CMat<Dual> alpha;
    sphere_coframe_core(n_, q.data(), th, alpha);

    CoframeJet j;
    j.cf.theta = Eigen::VectorXd(D);
    j.cf.theta_alpha = Eigen::MatrixXcd(n_, D);
    j.cf.levi = Eigen::MatrixXcd::Identity(n_, n_);
    j.theta_d = Eigen::MatrixXd(D, D);
    j.alpha_d.assign(n_, Eigen::MatrixXcd(D, D));
    for (int i = 0; i < D; ++i) {
      j.cf.theta[i] = th[i].v;
      for (int k = 0; k < D; ++k) j.theta_d(i, k) = th[i].d[k];
    }
    for (int a = 0; a < n_; ++a)
      for (int i = 0; i < D; ++i) {
        j.cf.theta_alpha(a, i) = Cd(alpha(a, i).re.v, alpha(a, i).im.v);
        for (int k = 0; k < D; ++k)
          j.alpha_d[a](i, k) = Cd(alpha(a, i).re.d[k], alpha(a, i).im.d[k]);
      }
    return j;
  }

  bool has_ambient() const override { return true; }

  Eigen::VectorXcd ambient(const ChartPoint& p) const override {
    cx<double> Z[kMaxDim];
    CMat<double> J;
    ambient_jet(n_, p.data(), Z, J);
    Eigen::VectorXcd out(n_ + 1);
    for (int j = 0; j <= n_; ++j) out[j] = Cd(Z[j].re, Z[j].im);
    return out;
  }

  ChartPoint chart_from_ambient(const Eigen::VectorXcd& Z) const override {
    if (Z.size() != n_ + 1) throw std::invalid_argument("chart_from_ambient: bad size");
    ChartPoint p(dim());
    for (int a = 0; a < n_; ++a) {
      p[2 * a] = Z[a].real();
      p[2 * a + 1] = Z[a].imag();
    }
    p[2 * n_] = std::atan2(Z[n_].imag(), Z[n_].real());
    return p;
  }

 private:
  int n_;
};

}  // namespace

ModelPtr sphere_model(int n) {
  if (n < 1) throw std::invalid_argument("sphere_model: n must be >= 1");
  return std::make_shared<SphereModel>(n);
}

}  // namespace crlab

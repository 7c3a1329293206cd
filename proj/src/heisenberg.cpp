#include <stdexcept>

#include "crlab/model.hpp"

namespace crlab {

// Coordinates (x^1, y^1, ..., x^n, y^n, u), z^a = x^a + i y^a.
// theta = du + sum(2 x^a dy^a - 2 y^a dx^a), theta^a = sqrt(2) dz^a.
namespace {

class HeisenbergModel final : public ModelManifold {
 public:
  explicit HeisenbergModel(int n) : n_(n) {}
  int n() const override { return n_; }
  std::string name() const override { return "heisenberg-" + std::to_string(n_); }
  bool contains(const ChartPoint& p) const override { return p.size() == dim(); }

  CoframeEval coframe(const ChartPoint& p) const override {
    const int D = dim();
    CoframeEval cf;
    cf.theta = Eigen::VectorXd::Zero(D);
    for (int a = 0; a < n_; ++a) {
      cf.theta[2 * a] = -2.0 * p[2 * a + 1];
      cf.theta[2 * a + 1] = 2.0 * p[2 * a];
    }
    cf.theta[2 * n_] = 1.0;
    cf.theta_alpha = Eigen::MatrixXcd::Zero(n_, D);
    const double s2 = std::sqrt(2.0);
    for (int a = 0; a < n_; ++a) {
      cf.theta_alpha(a, 2 * a) = s2;
      cf.theta_alpha(a, 2 * a + 1) = Cd(0.0, s2);
    }
    cf.levi = Eigen::MatrixXcd::Identity(n_, n_);
    return cf;
  }

  CoframeJet jet(const ChartPoint& p) const override {
    const int D = dim();
    CoframeJet j;
    j.cf = coframe(p);
    j.theta_d = Eigen::MatrixXd::Zero(D, D);
    for (int a = 0; a < n_; ++a) {
      j.theta_d(2 * a, 2 * a + 1) = -2.0;  // d_y (theta_x) = -2
      j.theta_d(2 * a + 1, 2 * a) = 2.0;   // d_x (theta_y) = 2
    }
    j.alpha_d.assign(n_, Eigen::MatrixXcd::Zero(D, D));
    return j;
  }

 private:
  int n_;
};

}  // namespace

ModelPtr heisenberg_model(int n) {
  if (n < 1) throw std::invalid_argument("heisenberg_model: n must be >= 1");
  return std::make_shared<HeisenbergModel>(n);
}

}  // namespace crlab

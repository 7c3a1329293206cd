#include "crlab/model.hpp"

#include <stdexcept>

#include "crlab/geometry.hpp"

namespace crlab {

FrameEval frame(const CoframeEval& cf) {
  const int D = cf.theta.size();
  const int n = cf.theta_alpha.rows();
  Eigen::MatrixXcd B(D, D);
  B.row(0) = cf.theta.cast<Cd>();
  for (int a = 0; a < n; ++a) {
    B.row(1 + a) = cf.theta_alpha.row(a);
    B.row(1 + n + a) = cf.theta_alpha.row(a).conjugate();
  }
  Eigen::MatrixXcd Binv = B.partialPivLu().inverse();
  FrameEval fr;
  Eigen::VectorXcd t = Binv.col(0);
  if (t.imag().cwiseAbs().maxCoeff() > 1e-9)
    throw std::runtime_error("frame: Reeb vector has nonreal components");
  fr.T = t.real();
  fr.L = Binv.middleCols(1, n);
  return fr;
}

Eigen::MatrixXd dtheta_matrix(const CoframeJet& j) {
  return j.theta_d.transpose() - j.theta_d;
}

Eigen::MatrixXcd dtheta_alpha_matrix(const CoframeJet& j, int a) {
  return j.alpha_d[a].transpose() - j.alpha_d[a];
}

double structure_residual(const ModelManifold& m, const ChartPoint& p) {
  CoframeJet j = m.jet(p);
  Eigen::MatrixXcd r = dtheta_matrix(j).cast<Cd>();
  for (int a = 0; a < m.n(); ++a) {
    Eigen::VectorXcd row = j.cf.theta_alpha.row(a);
    r -= Cd(0, 1) * wedge11(row, row.conjugate());
  }
  return r.cwiseAbs().maxCoeff();
}

namespace {

class FdJetModel final : public ModelManifold {
 public:
  FdJetModel(ModelPtr base, double step) : base_(std::move(base)), h_(step) {}
  int n() const override { return base_->n(); }
  std::string name() const override { return base_->name() + "+fd"; }
  bool contains(const ChartPoint& p) const override { return base_->contains(p); }
  CoframeEval coframe(const ChartPoint& p) const override { return base_->coframe(p); }

  CoframeJet jet(const ChartPoint& p) const override {
    const int D = dim();
    CoframeJet j;
    j.cf = base_->coframe(p);
    j.theta_d = Eigen::MatrixXd(D, D);
    j.alpha_d.assign(n(), Eigen::MatrixXcd(D, D));
    for (int k = 0; k < D; ++k) {
      const double hk = h_ * std::max(1.0, std::abs(p[k]));
      ChartPoint pp = p, pm = p;
      pp[k] += hk;
      pm[k] -= hk;
      if (!base_->contains(pp) || !base_->contains(pm))
        throw std::runtime_error("fd jet: stencil leaves chart domain");
      CoframeEval fp = base_->coframe(pp), fm = base_->coframe(pm);
      j.theta_d.col(k) = (fp.theta - fm.theta) / (2.0 * hk);
      for (int a = 0; a < n(); ++a)
        j.alpha_d[a].col(k) =
            (fp.theta_alpha.row(a) - fm.theta_alpha.row(a)).transpose() / (2.0 * hk);
    }
    return j;
  }

  bool has_ambient() const override { return base_->has_ambient(); }
  Eigen::VectorXcd ambient(const ChartPoint& p) const override { return base_->ambient(p); }
  ChartPoint chart_from_ambient(const Eigen::VectorXcd& z) const override {
    return base_->chart_from_ambient(z);
  }

 private:
  ModelPtr base_;
  double h_;
};

class RescaledModel final : public ModelManifold {
 public:
  RescaledModel(ModelPtr base, double mu) : base_(std::move(base)), mu_(mu), smu_(std::sqrt(mu)) {}
  int n() const override { return base_->n(); }
  std::string name() const override { return base_->name() + "*mu"; }
  bool contains(const ChartPoint& p) const override { return base_->contains(p); }

  CoframeEval coframe(const ChartPoint& p) const override {
    CoframeEval cf = base_->coframe(p);
    cf.theta *= mu_;
    cf.theta_alpha *= smu_;
    return cf;
  }
  CoframeJet jet(const ChartPoint& p) const override {
    CoframeJet j = base_->jet(p);
    j.cf.theta *= mu_;
    j.cf.theta_alpha *= smu_;
    j.theta_d *= mu_;
    for (auto& m : j.alpha_d) m *= smu_;
    return j;
  }

  bool has_ambient() const override { return base_->has_ambient(); }
  Eigen::VectorXcd ambient(const ChartPoint& p) const override { return base_->ambient(p); }
  ChartPoint chart_from_ambient(const Eigen::VectorXcd& z) const override {
    return base_->chart_from_ambient(z);
  }

 private:
  ModelPtr base_;
  double mu_, smu_;
};

class RotatedCoframeModel final : public ModelManifold {
 public:
  RotatedCoframeModel(ModelPtr base, std::function<UnitaryField(const ChartPoint&)> rot)
      : base_(std::move(base)), rot_(std::move(rot)) {}
  int n() const override { return base_->n(); }
  std::string name() const override { return base_->name() + "+rot"; }
  bool contains(const ChartPoint& p) const override { return base_->contains(p); }

  CoframeEval coframe(const ChartPoint& p) const override {
    CoframeEval cf = base_->coframe(p);
    UnitaryField u = rot_(p);
    cf.theta_alpha = u.U * cf.theta_alpha;
    return cf;
  }
  CoframeJet jet(const ChartPoint& p) const override {
    CoframeJet j = base_->jet(p);
    UnitaryField u = rot_(p);
    const int D = dim();
    std::vector<Eigen::MatrixXcd> rotated(n(), Eigen::MatrixXcd(D, D));
    for (int a = 0; a < n(); ++a)
      for (int k = 0; k < D; ++k) {
        Eigen::VectorXcd col = Eigen::VectorXcd::Zero(D);
        for (int b = 0; b < n(); ++b)
          col += u.dU[k](a, b) * j.cf.theta_alpha.row(b).transpose() +
                 u.U(a, b) * j.alpha_d[b].col(k);
        rotated[a].col(k) = col;
      }
    j.alpha_d = std::move(rotated);
    j.cf.theta_alpha = u.U * j.cf.theta_alpha;
    return j;
  }

  bool has_ambient() const override { return base_->has_ambient(); }
  Eigen::VectorXcd ambient(const ChartPoint& p) const override { return base_->ambient(p); }
  ChartPoint chart_from_ambient(const Eigen::VectorXcd& z) const override {
    return base_->chart_from_ambient(z);
  }

 private:
  ModelPtr base_;
  std::function<UnitaryField(const ChartPoint&)> rot_;
};

}  // namespace

ModelPtr with_fd_jets(ModelPtr base, double step) {
  return std::make_shared<FdJetModel>(std::move(base), step);
}
ModelPtr with_rescaled_contact(ModelPtr base, double mu) {
  if (mu <= 0) throw std::invalid_argument("with_rescaled_contact: mu must be positive");
  return std::make_shared<RescaledModel>(std::move(base), mu);
}
ModelPtr with_rotated_coframe(ModelPtr base,
                              std::function<UnitaryField(const ChartPoint&)> rot) {
  return std::make_shared<RotatedCoframeModel>(std::move(base), std::move(rot));
}

}  // namespace crlab

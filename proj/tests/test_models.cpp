#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "crlab/model.hpp"

using namespace crlab;

namespace {

ChartPoint random_point(const ModelManifold& m, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ChartPoint p(m.dim());
  for (;;) {
    for (int i = 0; i < m.dim(); ++i) p[i] = 0.5 * u(rng);
    if (m.contains(p)) return p;
  }
}

}  // namespace

TEST_CASE("heisenberg coframe is the standard left-invariant one") {
  auto m = heisenberg_model(1);
  ChartPoint p(3);
  p << 0.7, -0.3, 0.2;  // (x, y, t)
  CoframeEval cf = m->coframe(p);
  // theta = dt + i sum (z dzbar - zbar dz) = dt + 2(x dy - y dx)
  CHECK(cf.theta[0] == doctest::Approx(-2.0 * p[1]).epsilon(1e-14));
  CHECK(cf.theta[1] == doctest::Approx(2.0 * p[0]).epsilon(1e-14));
  CHECK(cf.theta[2] == doctest::Approx(1.0).epsilon(1e-14));
  // theta^1 = sqrt(2) dz (the admissibility convention dtheta = i theta^a ^
  // theta^abar absorbs the factor 2)
  const double s2 = std::sqrt(2.0);
  CHECK(std::abs(cf.theta_alpha(0, 0) - Cd(s2, 0)) < 1e-14);
  CHECK(std::abs(cf.theta_alpha(0, 1) - Cd(0, s2)) < 1e-14);
  CHECK(std::abs(cf.theta_alpha(0, 2)) < 1e-14);
}

TEST_CASE("sphere ambient map lands on the unit sphere") {
  std::mt19937 rng(11);
  for (int n : {1, 2}) {
    auto m = sphere_model(n);
    for (int k = 0; k < 20; ++k) {
      ChartPoint p = random_point(*m, rng);
      Eigen::VectorXcd Z = m->ambient(p);
      CHECK(std::abs(Z.squaredNorm() - 1.0) < 1e-14);
      ChartPoint back = m->chart_from_ambient(Z);
      CHECK((back - p).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("structure equation residuals, analytic jets") {
  std::mt19937 rng(42);
  for (auto m : {heisenberg_model(1), heisenberg_model(2), sphere_model(1), sphere_model(2)}) {
    double worst = 0.0;
    for (int k = 0; k < 20; ++k)
      worst = std::max(worst, structure_residual(*m, random_point(*m, rng)));
    INFO(m->name());
    CHECK(worst < 1e-8);
  }
}

TEST_CASE("structure equation residuals, finite-difference jets") {
  std::mt19937 rng(43);
  for (auto base : {heisenberg_model(2), sphere_model(1)}) {
    auto m = with_fd_jets(base, 1e-5);
    double worst = 0.0;
    for (int k = 0; k < 10; ++k)
      worst = std::max(worst, structure_residual(*m, random_point(*m, rng)));
    INFO(base->name());
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("analytic and finite-difference jets agree") {
  std::mt19937 rng(44);
  for (auto base : {heisenberg_model(1), sphere_model(2)}) {
    auto fd = with_fd_jets(base, 1e-6);
    for (int k = 0; k < 5; ++k) {
      ChartPoint p = random_point(*base, rng);
      CoframeJet ja = base->jet(p), jf = fd->jet(p);
      CHECK((ja.theta_d - jf.theta_d).cwiseAbs().maxCoeff() < 1e-7);
      for (int a = 0; a < base->n(); ++a)
        CHECK((ja.alpha_d[a] - jf.alpha_d[a]).cwiseAbs().maxCoeff() < 1e-7);
    }
  }
}

TEST_CASE("domain checks") {
  auto h = heisenberg_model(1);
  auto s = sphere_model(1);
  ChartPoint p(3);
  p << 0.96, 0.0, 0.0;  // |z|^2 = 0.9216 > 0.9
  CHECK(h->contains(p));
  CHECK(!s->contains(p));
  ChartPoint q(3);
  q << 0.0, 0.0, 9.0;  // phi out of range
  CHECK(!s->contains(q));
  CHECK(!s->contains(Eigen::VectorXd::Zero(5)));
}

TEST_CASE("frame is dual to the coframe") {
  std::mt19937 rng(45);
  for (auto m : {heisenberg_model(2), sphere_model(2)}) {
    ChartPoint p = random_point(*m, rng);
    CoframeEval cf = m->coframe(p);
    FrameEval fr = frame(cf);
    const int n = m->n();
    CHECK(std::abs(cf.theta.dot(fr.T) - 1.0) < 1e-12);
    for (int a = 0; a < n; ++a) {
      CHECK(std::abs((cf.theta_alpha.row(a) * fr.T.cast<Cd>()).value()) < 1e-12);
      CHECK(std::abs(cf.theta.cast<Cd>().dot(fr.L.col(a))) < 1e-12);
      for (int b = 0; b < n; ++b) {
        Cd d = (cf.theta_alpha.row(a) * fr.L.col(b)).value();
        CHECK(std::abs(d - (a == b ? Cd(1, 0) : Cd(0, 0))) < 1e-12);
        // theta^a(Lbar_b) = 0
        CHECK(std::abs((cf.theta_alpha.row(a) * fr.L.col(b).conjugate()).value()) < 1e-12);
      }
    }
  }
}

TEST_CASE("contact rescaling decorator") {
  auto base = sphere_model(1);
  auto m = with_rescaled_contact(base, 2.0);
  std::mt19937 rng(46);
  ChartPoint p = random_point(*base, rng);
  CoframeEval a = base->coframe(p), b = m->coframe(p);
  CHECK((b.theta - 2.0 * a.theta).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((b.theta_alpha - std::sqrt(2.0) * a.theta_alpha).cwiseAbs().maxCoeff() < 1e-14);
  // rescaled coframe is again admissible
  CHECK(structure_residual(*m, p) < 1e-8);
}

TEST_CASE("coframe rotation decorator keeps the structure equation") {
  auto base = sphere_model(2);
  std::mt19937 rng(47);
  ChartPoint p = random_point(*base, rng);
  auto rot = [](const ChartPoint& q) {
    UnitaryField f;
    double c = std::cos(q[0]), s = std::sin(q[0]);
    f.U = Eigen::MatrixXcd(2, 2);
    f.U << Cd(c, 0), Cd(s, 0), Cd(-s, 0), Cd(c, 0);
    f.dU.assign(q.size(), Eigen::MatrixXcd::Zero(2, 2));
    f.dU[0] << Cd(-s, 0), Cd(c, 0), Cd(-c, 0), Cd(-s, 0);
    return f;
  };
  auto m = with_rotated_coframe(base, rot);
  CHECK(structure_residual(*m, p) < 1e-8);
  CoframeEval a = base->coframe(p), b = m->coframe(p);
  CHECK((b.theta_alpha - rot(p).U * a.theta_alpha).cwiseAbs().maxCoeff() < 1e-12);
}

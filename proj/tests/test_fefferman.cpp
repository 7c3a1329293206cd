#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "crlab/chains.hpp"
#include "crlab/fefferman.hpp"

using namespace crlab;

namespace {

ChartPoint random_base(const ModelManifold& m, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-0.45, 0.45);
  ChartPoint p(m.dim());
  for (;;) {
    for (int i = 0; i < m.dim(); ++i) p[i] = u(rng);
    if (m.contains(p)) return p;
  }
}

double curve_distance(const std::vector<Eigen::VectorXd>& A,
                      const std::vector<Eigen::VectorXd>& B) {
  double worst = 0.0;
  for (const auto& p : A) {
    double best = 1e300;
    for (std::size_t i = 0; i + 1 < B.size(); ++i) {
      Eigen::VectorXd d = B[i + 1] - B[i];
      double L2 = d.squaredNorm();
      double s = L2 > 0 ? std::clamp((p - B[i]).dot(d) / L2, 0.0, 1.0) : 0.0;
      best = std::min(best, (p - B[i] - s * d).squaredNorm());
    }
    worst = std::max(worst, std::sqrt(best));
  }
  return worst;
}

}  // namespace

TEST_CASE("sigma on the Heisenberg group is dt / (n+2)") {
  for (int n : {1, 2}) {
    auto m = heisenberg_model(n);
    std::mt19937 rng(31);
    SigmaEval sg = sigma(*m, random_base(*m, rng));
    Eigen::VectorXd expect = Eigen::VectorXd::Zero(2 * n + 2);
    expect[2 * n + 1] = 1.0 / (n + 2);
    CHECK((sg.row - expect).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(std::abs(sg.scalar_R) < 1e-9);
  }
}

TEST_CASE("sigma dt coefficient is 1/(n+2) everywhere") {
  std::mt19937 rng(32);
  for (auto m : {sphere_model(1), sphere_model(2)}) {
    SigmaEval sg = sigma(*m, random_base(*m, rng));
    CHECK(sg.row[m->dim()] == doctest::Approx(1.0 / (m->n() + 2)).epsilon(1e-12));
    CHECK(std::abs(sg.scalar_R - m->n() * (m->n() + 1)) < 1e-8);
  }
}

TEST_CASE("fefferman metric has signature (2n+1, 1)") {
  std::mt19937 rng(33);
  for (auto m : {heisenberg_model(1), sphere_model(1), sphere_model(2)}) {
    for (int k = 0; k < 10; ++k) {
      Eigen::VectorXd cp(m->dim() + 1);
      cp.head(m->dim()) = random_base(*m, rng);
      cp[m->dim()] = std::uniform_real_distribution<double>(-1, 1)(rng);
      MetricEval me = metric(*m, cp);
      CHECK((me.h - me.h.transpose()).cwiseAbs().maxCoeff() < 1e-9);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(me.h);
      int neg = 0, pos = 0;
      for (int i = 0; i < es.eigenvalues().size(); ++i) {
        if (es.eigenvalues()[i] < -1e-8) ++neg;
        if (es.eigenvalues()[i] > 1e-8) ++pos;
      }
      INFO(m->name());
      CHECK(neg == 1);
      CHECK(pos == 2 * m->n() + 1);
    }
  }
}

TEST_CASE("metric is independent of the fiber coordinate") {
  auto m = sphere_model(1);
  std::mt19937 rng(34);
  Eigen::VectorXd cp(4);
  cp.head(3) = random_base(*m, rng);
  cp[3] = 0.3;
  Eigen::VectorXd cp2 = cp;
  cp2[3] = -1.1;
  CHECK((metric(*m, cp).h - metric(*m, cp2).h).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("null lift is null and projects onto the chain tangent") {
  std::mt19937 rng(35);
  for (auto m : {heisenberg_model(2), sphere_model(1)}) {
    ChartPoint p = random_base(*m, rng);
    Eigen::VectorXcd a(m->n());
    for (int i = 0; i < m->n(); ++i) a[i] = Cd(0.2 / (i + 1), -0.1);
    FeffermanState st = null_lift(*m, p, a, 0.4);
    MetricEval me = metric(*m, st.point);
    CHECK(std::abs(st.velocity.dot(me.h * st.velocity)) < 1e-10);
    // base projection of the velocity = chain tangent
    CoframeEval cf = m->coframe(p);
    FrameEval fr = frame(cf);
    Eigen::VectorXcd w = 2.0 * (fr.L * a);
    Eigen::VectorXd want = fr.T + 2.0 * w.real();
    CHECK((st.velocity.head(m->dim()) - want).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("null geodesics stay null") {
  auto m = sphere_model(1);
  ChartPoint p = Eigen::VectorXd::Zero(3);
  Eigen::VectorXcd a(1);
  a[0] = Cd(0.25, -0.1);
  FeffermanState st = null_lift(*m, p, a, 0.0);
  FeffermanTrajectory tr = integrate_null_geodesic(*m, st, 1.0, 2e-3);
  REQUIRE(tr.status == IntegrationStatus::Completed);
  CHECK(tr.max_null_defect < 1e-8);
}

TEST_CASE("projected null geodesics are chains") {
  for (auto m : {heisenberg_model(1), sphere_model(1)}) {
    ChartPoint p = Eigen::VectorXd::Zero(3);
    Eigen::VectorXcd a(1);
    a[0] = Cd(0.25, -0.1);

    ChainTrajectory ch = integrate_chain(*m, {p, a}, 1.0, 1e-3);
    REQUIRE(ch.status == IntegrationStatus::Completed);
    FeffermanState st = null_lift(*m, p, a, 0.0);
    FeffermanTrajectory ge = integrate_null_geodesic(*m, st, 1.0, 2e-3);
    REQUIRE(ge.status == IntegrationStatus::Completed);

    std::vector<Eigen::VectorXd> chain_pts, geo_pts;
    for (auto& s : ch.samples) chain_pts.push_back(s.point);
    std::vector<CurvePoint> proj = projected_curve(ge);
    for (std::size_t i = 0; i < proj.size(); i += 25) geo_pts.push_back(proj[i].point);

    INFO(m->name());
    CHECK(curve_distance(geo_pts, chain_pts) < 1e-6);
    CHECK(chain_residual(*m, proj, 2, 50) < 1e-6);
  }
}

TEST_CASE("fiber shift acts as an isometry: geodesic commutes with the shift") {
  auto m = sphere_model(1);
  ChartPoint p = Eigen::VectorXd::Zero(3);
  Eigen::VectorXcd a(1);
  a[0] = Cd(0.2, 0.1);
  FeffermanState s0 = null_lift(*m, p, a, 0.0);
  FeffermanState s1 = null_lift(*m, p, a, 0.7);
  CHECK((s1.velocity - s0.velocity).cwiseAbs().maxCoeff() < 1e-12);
  FeffermanTrajectory t0 = integrate_null_geodesic(*m, s0, 0.5, 2e-3);
  FeffermanTrajectory t1 = integrate_null_geodesic(*m, s1, 0.5, 2e-3);
  REQUIRE(t0.status == IntegrationStatus::Completed);
  REQUIRE(t1.status == IntegrationStatus::Completed);
  const auto& e0 = t0.samples.back();
  const auto& e1 = t1.samples.back();
  CHECK((e1.point.head(3) - e0.point.head(3)).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(e1.point[3] - e0.point[3] == doctest::Approx(0.7).epsilon(1e-10));
}

TEST_CASE("Levi-Civita connection forms reproduce the metric structure") {
  std::mt19937 rng(36);
  for (auto m : {heisenberg_model(1), sphere_model(1)}) {
    ChartPoint p = random_base(*m, rng);
    LcCheckResult r = levi_civita_forms_check(*m, p);
    INFO(m->name());
    CHECK(r.frame_metric_residual < 1e-8);
    CHECK(r.compat_residual < 1e-6);
    CHECK(r.christoffel_residual < 1e-5);
  }
}

TEST_CASE("connection forms are nontrivial, so the Christoffel match has teeth") {
  // the diagonal L~-block carries i sigma: an O(1) object. A sign or factor
  // slip anywhere would show up as an O(1) christoffel_residual above.
  auto m = sphere_model(1);
  ChartPoint p = Eigen::VectorXd::Zero(3);
  LeeForms lf = lee_forms(*m, p);
  double mx = 0.0;
  for (const auto& row : lf.omega) mx = std::max(mx, row.cwiseAbs().maxCoeff());
  CHECK(mx > 0.1);
  CHECK(lf.H.cwiseAbs().maxCoeff() > 0.1);
}

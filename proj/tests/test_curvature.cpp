#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "crlab/curvature.hpp"

using namespace crlab;

namespace {

ChartPoint random_point(const ModelManifold& m, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-0.45, 0.45);
  ChartPoint p(m.dim());
  for (;;) {
    for (int i = 0; i < m.dim(); ++i) p[i] = u(rng);
    if (m.contains(p)) return p;
  }
}

}  // namespace

TEST_CASE("heisenberg curvature vanishes") {
  std::mt19937 rng(21);
  auto m = heisenberg_model(1);
  ChartPoint p = random_point(*m, rng);
  CurvatureEval cv = curvature(*m, p);
  CHECK(std::abs(cv.scalar) < 1e-10);
  CHECK(cv.ricci.cwiseAbs().maxCoeff() < 1e-10);
  for (const auto& blk : cv.blocks) CHECK(blk.cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("sphere curvature tensor, Ricci and scalar") {
  std::mt19937 rng(22);
  for (int n : {1, 2}) {
    auto m = sphere_model(n);
    ChartPoint p = random_point(*m, rng);
    CurvatureEval cv = curvature(*m, p);
    INFO(m->name());
    CHECK(std::abs(cv.scalar - n * (n + 1)) < 1e-8);
    CHECK((cv.ricci - Cd(n + 1, 0) * Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff() <
          1e-8);
    // R_{a bbar mu nubar} = delta_{ab} delta_{mu nu} + delta_{a nu} delta_{mu b}
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int mu = 0; mu < n; ++mu)
          for (int nu = 0; nu < n; ++nu) {
            Cd want((a == b && mu == nu) + (a == nu && mu == b), 0);
            CHECK(std::abs(cv.blocks[a * n + b](mu, nu) - want) < 1e-7);
          }
    CHECK(cv.expansion_residual < 1e-6);
  }
}

TEST_CASE("scalar curvature is position independent on the sphere") {
  std::mt19937 rng(23);
  auto m = sphere_model(2);
  double r0 = curvature(*m, random_point(*m, rng)).scalar;
  double r1 = curvature(*m, random_point(*m, rng)).scalar;
  CHECK(std::abs(r0 - r1) < 1e-6);
}

TEST_CASE("first Bianchi symmetry of the sphere curvature") {
  std::mt19937 rng(24);
  auto m = sphere_model(2);
  ChartPoint p = random_point(*m, rng);
  CurvatureEval cv = curvature(*m, p);
  const int n = 2;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int mu = 0; mu < n; ++mu)
        for (int nu = 0; nu < n; ++nu)
          CHECK(std::abs(cv.blocks[a * n + b](mu, nu) - cv.blocks[mu * n + b](a, nu)) < 1e-6);
}

TEST_CASE("pseudo-Einstein residual") {
  std::mt19937 rng(25);
  auto m = sphere_model(2);
  CurvatureEval cv = curvature(*m, random_point(*m, rng));
  CHECK(pseudo_einstein_residual(cv) < 1e-7);

  // a hermitian perturbation of the Ricci tensor must register in full
  CurvatureEval bad = cv;
  bad.ricci(0, 1) += Cd(1, 0);
  bad.ricci(1, 0) += Cd(1, 0);
  CHECK(pseudo_einstein_residual(bad) >= std::sqrt(2.0) * (1 - 1e-6));
}

TEST_CASE("pseudo-Einstein form is closed on the sphere: loop integrals") {
  auto m = sphere_model(1);
  ChartPoint p(3);
  p << 0.1, -0.1, 0.2;
  std::mt19937 rng(26);
  std::normal_distribution<double> g;
  for (int k = 0; k < 4; ++k) {
    Eigen::VectorXd u(3), v(3);
    for (int i = 0; i < 3; ++i) {
      u[i] = g(rng);
      v[i] = g(rng);
    }
    u.normalize();
    v -= v.dot(u) * u;
    v.normalize();
    double defect = closedness_defect(*m, p, u, v, 0.15);
    CHECK(std::abs(defect) < 1e-6);
  }
}

TEST_CASE("closedness defect control: Green's theorem on a non-closed form") {
  // integral of x0 dx1 over the rectangle loop = its area
  auto m = heisenberg_model(1);
  ChartPoint p(3);
  p << 0.3, 0.1, 0.0;
  std::vector<ChartPoint> loop =
      rectangle_loop(p, Eigen::VectorXd::Unit(3, 0), Eigen::VectorXd::Unit(3, 1), 0.1);
  double got = loop_integral(
      [](const ChartPoint& q) {
        Eigen::VectorXd row = Eigen::VectorXd::Zero(3);
        row[1] = q[0];
        return row;
      },
      loop, 50);
  CHECK(got == doctest::Approx(0.01).epsilon(0.05));
}

TEST_CASE("Chern-Moser coefficients on the Heisenberg group vanish") {
  std::mt19937 rng(27);
  auto m = heisenberg_model(2);
  ChernMoserEval cm = chern_moser(*m, random_point(*m, rng));
  CHECK(cm.D.cwiseAbs().maxCoeff() < 1e-10);
  CHECK(cm.E.cwiseAbs().maxCoeff() < 1e-10);
  for (const auto& row : cm.phi_matrix) CHECK(row.cwiseAbs().maxCoeff() < 1e-10);
  for (const auto& row : cm.phi_vector) CHECK(row.cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("Chern-Moser D and E on spheres") {
  std::mt19937 rng(28);
  for (int n : {1, 2}) {
    auto m = sphere_model(n);
    ChernMoserEval cm = chern_moser(*m, random_point(*m, rng));
    INFO(m->name());
    // regression: D = (i/2) identity in this normalization, |D| = sqrt(n)/2
    CHECK((cm.D - Cd(0, 0.5) * Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-7);
    CHECK(cm.D.norm() == doctest::Approx(0.5 * std::sqrt(double(n))).epsilon(1e-6));
    CHECK(cm.E.cwiseAbs().maxCoeff() < 1e-6);
    // -i D is hermitian
    Eigen::MatrixXcd mid = Cd(0, -1) * cm.D;
    CHECK((mid - mid.adjoint()).cwiseAbs().maxCoeff() < 1e-7);
  }
}

TEST_CASE("phi rows reproduce omega + D theta exactly") {
  std::mt19937 rng(29);
  auto m = sphere_model(1);
  ChartPoint p = random_point(*m, rng);
  ChernMoserEval cm = chern_moser(*m, p);
  CoframeJet j = m->jet(p);
  ConnectionEval c = solve_connection_from_jet(j);
  Eigen::VectorXcd expect =
      c.omega_row(j.cf, 0, 0) + cm.D(0, 0) * j.cf.theta.cast<Cd>();
  CHECK((cm.phi_matrix[0] - expect).cwiseAbs().maxCoeff() < 1e-12);
  Eigen::VectorXcd expect_v = c.tau_row(j.cf, 0) + cm.E(0) * j.cf.theta.cast<Cd>() +
                              cm.D(0, 0) * j.cf.theta_alpha.row(0).transpose();
  CHECK((cm.phi_vector[0] - expect_v).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("curvature via finite-difference jets stays close") {
  auto base = sphere_model(1);
  auto fd = with_fd_jets(base, 1e-5);
  ChartPoint p(3);
  p << 0.2, 0.1, -0.3;
  double ra = curvature(*base, p).scalar;
  double rf = curvature(*fd, p).scalar;
  CHECK(std::abs(ra - rf) < 1e-4);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "crlab/connection.hpp"

using namespace crlab;

namespace {

ChartPoint random_point(const ModelManifold& m, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  ChartPoint p(m.dim());
  for (;;) {
    for (int i = 0; i < m.dim(); ++i) p[i] = u(rng);
    if (m.contains(p)) return p;
  }
}

}  // namespace

TEST_CASE("heisenberg connection and torsion vanish") {
  std::mt19937 rng(1);
  for (int n : {1, 2}) {
    auto m = heisenberg_model(n);
    for (int k = 0; k < 10; ++k) {
      ConnectionEval c = solve_connection(*m, random_point(*m, rng));
      CHECK(c.omega_T.cwiseAbs().maxCoeff() < 1e-10);
      CHECK(c.A.cwiseAbs().maxCoeff() < 1e-10);
      for (int mm = 0; mm < n; ++mm) {
        CHECK(c.omega_H[mm].cwiseAbs().maxCoeff() < 1e-10);
        CHECK(c.omega_Hb[mm].cwiseAbs().maxCoeff() < 1e-10);
      }
      CHECK(c.residual < 1e-10);
    }
  }
}

TEST_CASE("structure equation reconstruction residual on spheres") {
  std::mt19937 rng(2);
  for (int n : {1, 2}) {
    auto m = sphere_model(n);
    double worst = 0.0, worst_ls = 0.0;
    for (int k = 0; k < 10; ++k) {
      ConnectionEval c = solve_connection(*m, random_point(*m, rng));
      worst = std::max(worst, c.residual);
      worst_ls = std::max(worst_ls, c.ls_residual);
    }
    INFO(m->name());
    CHECK(worst < 1e-8);
    CHECK(worst_ls < 1e-9);
  }
}

TEST_CASE("connection matrix is skew-hermitian in the Levi metric") {
  // omega_{a b} + conj(omega_{b a}) = 0 on every frame vector (Levi = id)
  std::mt19937 rng(3);
  for (auto m : {sphere_model(1), sphere_model(2)}) {
    ChartPoint p = random_point(*m, rng);
    CoframeJet j = m->jet(p);
    ConnectionEval c = solve_connection_from_jet(j);
    FrameEval fr = frame(j.cf);
    const int n = m->n();
    // test on T, on each L_m, and on each Lbar_m (as real + imaginary parts)
    std::vector<Eigen::VectorXcd> dirs;
    dirs.push_back(fr.T.cast<Cd>());
    for (int mm = 0; mm < n; ++mm) {
      dirs.push_back(fr.L.col(mm) + fr.L.col(mm).conjugate());
      dirs.push_back(Cd(0, 1) * (fr.L.col(mm) - fr.L.col(mm).conjugate()));
    }
    for (const auto& v : dirs)
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          Cd wab = (c.omega_row(j.cf, a, b).transpose() * v).value();
          Cd wba = (c.omega_row(j.cf, b, a).transpose() * v).value();
          CHECK(std::abs(wab + std::conj(wba)) < 1e-9);
        }
  }
}

TEST_CASE("torsion coefficients are symmetric") {
  std::mt19937 rng(4);
  for (auto m : {sphere_model(2), heisenberg_model(2)}) {
    ConnectionEval c = solve_connection(*m, random_point(*m, rng));
    CHECK((c.A - c.A.transpose()).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("sphere torsion vanishes") {
  std::mt19937 rng(5);
  for (int n : {1, 2}) {
    auto m = sphere_model(n);
    for (int k = 0; k < 5; ++k) {
      ConnectionEval c = solve_connection(*m, random_point(*m, rng));
      CHECK(c.A.cwiseAbs().maxCoeff() < 1e-9);
    }
  }
}

TEST_CASE("connection transforms as a gauge field under constant rotation") {
  // constant U: omega' = U omega U^H, no dU term
  auto base = sphere_model(2);
  Eigen::MatrixXcd U(2, 2);
  double c0 = std::cos(0.4), s0 = std::sin(0.4);
  U << Cd(c0, 0), Cd(s0, 0.1), Cd(-s0, 0.1), Cd(c0, 0);
  // orthonormalize to make it exactly unitary
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(U);
  U = qr.householderQ();
  auto rot = [U](const ChartPoint& q) {
    UnitaryField f;
    f.U = U;
    f.dU.assign(q.size(), Eigen::MatrixXcd::Zero(2, 2));
    return f;
  };
  auto m = with_rotated_coframe(base, rot);
  std::mt19937 rng(6);
  ChartPoint p = random_point(*base, rng);
  CoframeJet jb = base->jet(p), jr = m->jet(p);
  ConnectionEval cb = solve_connection_from_jet(jb);
  ConnectionEval cr = solve_connection_from_jet(jr);
  FrameEval fb = frame(jb.cf);
  // compare on the base frame vectors: omega'(v) = U omega(v) U^H.
  // index convention: omega_row(a, b) is the form omega_a^b, so the matrix
  // (omega(v))_{ab} transforms with conj(U) on the left.
  std::vector<Eigen::VectorXd> dirs{fb.T, Eigen::VectorXd(fb.L.col(0).real()),
                                    Eigen::VectorXd(fb.L.col(1).imag())};
  for (const auto& v : dirs) {
    Eigen::MatrixXcd wb(2, 2), wr(2, 2);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        wb(a, b) = (cb.omega_row(jb.cf, a, b).transpose() * v.cast<Cd>()).value();
        wr(a, b) = (cr.omega_row(jr.cf, a, b).transpose() * v.cast<Cd>()).value();
      }
    Eigen::MatrixXcd expect = U.conjugate() * wb * U.transpose();
    CHECK((wr - expect).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("exterior derivative of an exact form vanishes") {
  // field: f(p) * (dx row); d(df) = 0 sanity through the FD stack
  auto field = [](const ChartPoint& p) {
    FormEval f;
    f.dim = 3;
    f.degree = 1;
    f.f1 = Eigen::VectorXcd(3);
    // d(x^2 y + sin t): (2xy, x^2, cos t)
    f.f1 << Cd(2 * p[0] * p[1], 0), Cd(p[0] * p[0], 0), Cd(std::cos(p[2]), 0);
    return f;
  };
  ChartPoint p(3);
  p << 0.3, -0.2, 0.5;
  FormEval d = exterior_derivative(field, p, 1e-5, 2);
  CHECK(d.f2.cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("solver layout matches on a rescaled model") {
  // theta' = mu theta scales A by 1 (A^b_mbar entries keep Levi-normalized
  // frames); the reconstruction residual must stay small either way
  auto m = with_rescaled_contact(sphere_model(1), 0.5);
  std::mt19937 rng(7);
  ConnectionEval c = solve_connection(*m, random_point(*m, rng));
  CHECK(c.residual < 1e-8);
}

#pragma once

// Chart-based strictly pseudoconvex hypersurface models.
//
// A model is a single chart of real dimension 2n+1 with an explicit domain
// predicate and an evaluable admissible coframe {theta, theta^alpha} whose
// Levi matrix is the identity. Covectors are stored as rows against the chart
// coordinate co-basis; complex coframe rows are n x (2n+1) matrices.

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace crlab {

using ChartPoint = Eigen::VectorXd;
using Cd = std::complex<double>;

struct CoframeEval {
  Eigen::VectorXd theta;        // real row, length 2n+1
  Eigen::MatrixXcd theta_alpha; // n rows, each a complex covector
  Eigen::MatrixXcd levi;        // n x n hermitian (identity after normalization)
};

// First coordinate partials of every coframe coefficient.
// theta_d(i, k)    = d_k theta_i
// alpha_d[a](i, k) = d_k (theta^a)_i
struct CoframeJet {
  CoframeEval cf;
  Eigen::MatrixXd theta_d;
  std::vector<Eigen::MatrixXcd> alpha_d;
};

struct FrameEval {
  Eigen::VectorXd T;   // Reeb vector, theta(T) = 1
  Eigen::MatrixXcd L;  // columns L_alpha (n columns of length 2n+1)
};

class ModelManifold {
 public:
  virtual ~ModelManifold() = default;
  virtual int n() const = 0;                     // CR dimension
  int dim() const { return 2 * n() + 1; }
  virtual std::string name() const = 0;
  virtual bool contains(const ChartPoint& p) const = 0;
  virtual CoframeEval coframe(const ChartPoint& p) const = 0;
  virtual CoframeJet jet(const ChartPoint& p) const = 0;

  // Optional ambient realization (the sphere models carry one).
  virtual bool has_ambient() const { return false; }
  virtual Eigen::VectorXcd ambient(const ChartPoint&) const {
    throw std::runtime_error("model has no ambient realization");
  }
  virtual ChartPoint chart_from_ambient(const Eigen::VectorXcd&) const {
    throw std::runtime_error("model has no ambient realization");
  }
};

using ModelPtr = std::shared_ptr<const ModelManifold>;

ModelPtr heisenberg_model(int n);
ModelPtr sphere_model(int n);

// Dual frame {T, L_alpha} from the coframe by inverting the co-basis matrix.
FrameEval frame(const CoframeEval& cf);

// dtheta and dtheta^a as antisymmetric coefficient matrices, from the jet.
Eigen::MatrixXd dtheta_matrix(const CoframeJet& j);
Eigen::MatrixXcd dtheta_alpha_matrix(const CoframeJet& j, int a);

// || dtheta - i sum theta^a wedge theta^abar || at p (max coefficient norm).
double structure_residual(const ModelManifold& m, const ChartPoint& p);

// Decorator: replace analytic jets by central finite differences of coframe().
ModelPtr with_fd_jets(ModelPtr base, double step);

// Decorator: constant rescale theta' = mu theta, theta'^a = sqrt(mu) theta^a
// (mu > 0). Keeps admissibility; used to adapt embedding targets.
ModelPtr with_rescaled_contact(ModelPtr base, double mu);

// Decorator: pointwise unitary coframe rotation theta'^a = U_{ab}(p) theta^b.
// rot(p) must return U and its coordinate partials dU[k].
struct UnitaryField {
  Eigen::MatrixXcd U;
  std::vector<Eigen::MatrixXcd> dU;  // one per chart coordinate
};
ModelPtr with_rotated_coframe(ModelPtr base,
                              std::function<UnitaryField(const ChartPoint&)> rot);

}  // namespace crlab

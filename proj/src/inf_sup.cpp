#include "pstokes/inf_sup.hpp"

#include <Eigen/SparseCholesky>

#include <stdexcept>

namespace pstokes {

Eigen::MatrixXd pressure_schur_complement(const FeSystem& sys)
{
  Eigen::SimplicialLDLT<SparseMatrix> chol(sys.stiffness());
  if (chol.info() != Eigen::Success)
    throw std::runtime_error("inf_sup_constant: stiffness factorization failed");
  const Eigen::MatrixXd bt = Eigen::MatrixXd(sys.divergence().transpose());
  const Eigen::MatrixXd x = chol.solve(bt);
  Eigen::MatrixXd schur = sys.divergence() * x;
  return 0.5 * (schur + schur.transpose());
}

double inf_sup_constant(const FeSystem& sys)
{
  if (sys.num_free_velocity_dofs() == 0)
    throw std::invalid_argument("inf_sup_constant: no free velocity dofs");
  Eigen::MatrixXd schur = pressure_schur_complement(sys);
  const Eigen::MatrixXd mp = Eigen::MatrixXd(sys.pressure_mass());

  // Lift the constant mode: eigenvalues are bounded by 2 (|div v| <= sqrt(2) |Dv|),
  // the constant direction is moved to 10.
  const Vector& m1 = sys.pressure_mean_weights();
  const double area = m1.sum();
  schur += (10.0 / area) * m1 * m1.transpose();

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(schur, mp, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("inf_sup_constant: eigensolver failed");
  return std::sqrt(std::max(0.0, eig.eigenvalues()[0]));
}

}  // namespace pstokes

#ifndef PSTOKES_NEWTON_HPP
#define PSTOKES_NEWTON_HPP

#include "pstokes/fe_system.hpp"

#include <Eigen/SparseLU>

#include <array>
#include <functional>
#include <stdexcept>
#include <vector>

namespace pstokes {

/// Newton did not reach the tolerance, or the line search stalled.
class NewtonFailure : public std::runtime_error {
public:
  NewtonFailure(const std::string& what, int iterations, double residual)
      : std::runtime_error(what), iterations(iterations), residual(residual)
  {
  }
  int iterations;
  double residual;
};

/// The saddle-point matrix could not be factorized.
class SingularSystem : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Sparse direct solver for
///
///   [ H   -B^T ] [ du ]   [ f ]
///   [ -B   0   ] [ q  ] = [ g ],   m . q = 0,
///
/// with H in the velocity pattern of the system and m the pressure mean
/// weights. Bubble dofs are condensed cell by cell before the sparse LU, so
/// the factorized matrix only carries nodal velocities and pressures. Since
/// B^T 1 = 0 the first pressure dof is pinned to zero (its row of B is implied
/// by the others) and the pressure is shifted to zero mean afterwards; a
/// bordered mean row would be dense. The symbolic analysis is done once.
///
/// Keeps a reference to the FeSystem, which must outlive the solver.
class SaddleSolver {
public:
  explicit SaddleSolver(const FeSystem& sys);

  /// Throws SingularSystem on failure.
  void factorize(const SparseMatrix& h);

  struct Solution {
    Vector velocity;
    Vector pressure;
  };
  Solution solve(const Vector& f, const Vector& g);

private:
  // Local dofs of a cell in the reduced system: 6 nodal velocities, then
  // the 3 vertex pressures.
  using LocalOffsets = std::array<int, 81>;

  const FeSystem& sys_;
  int nu_;
  int np_;
  int nodal_;                                   // nodal free velocity dofs
  std::vector<int> nodal_free_;                 // reduced nodal -> free index
  std::vector<std::array<int, 6>> cell_nodal_;  // reduced nodal index or -1
  std::vector<std::array<int, 2>> cell_bubble_; // free index of the bubble dofs
  std::vector<Eigen::Matrix<double, 3, 2>> bubble_divergence_;
  std::vector<std::pair<int, int>> h_copy_;      // (value in H, value in kkt)
  std::vector<std::pair<int, double>> b_values_; // (value in kkt, -B entry)
  std::vector<LocalOffsets> offsets_;
  std::vector<Eigen::Matrix2d> w_inv_;
  std::vector<Eigen::Matrix<double, 6, 2>> h_nb_;
  SparseMatrix kkt_;
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu_;
};

/// A convex energy on the free velocity dofs with its gradient and (possibly
/// regularized) Hessian in the velocity pattern.
struct EnergyOracle {
  std::function<double(const Vector&)> energy;
  std::function<Vector(const Vector&)> gradient;
  std::function<SparseMatrix(const Vector&)> hessian;
};

struct NewtonOptions {
  double tol = 1e-10;
  int max_iterations = 50;
  int max_backtracks = 30;
  double armijo = 1e-4;
  double backtrack = 0.5;
};

struct NewtonResult {
  Vector velocity;
  Vector pressure;
  int iterations = 0;
  double residual = 0.0;
  /// Energy after each accepted iterate, starting with the initial guess.
  std::vector<double> energies;
};

/// Damped Newton for min E(u) subject to B u = 0 with Armijo backtracking on E.
///
/// Converged when |grad E(u) - B^T q| and |B u| are both at most
/// tol * (1 + load_norm). `pressure` is the multiplier q, normalized to zero
/// mean.
NewtonResult newton_solve(const EnergyOracle& oracle, SaddleSolver& solver, const SparseMatrix& divergence,
                          Vector init, Vector pressure_init, double load_norm, const NewtonOptions& opts);

}  // namespace pstokes

#endif

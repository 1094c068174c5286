#ifndef PSTOKES_FE_SYSTEM_HPP
#define PSTOKES_FE_SYSTEM_HPP

#include "pstokes/mesh.hpp"
#include "pstokes/nfunc.hpp"
#include "pstokes/quadrature.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <array>
#include <functional>
#include <vector>

namespace pstokes {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;

enum class Space { velocity, pressure };

/// Coefficient vector of a finite element function in the full layout of its
/// space. For velocity fields the boundary nodal entries are exactly zero.
struct Field {
  Space space = Space::velocity;
  Vector coeffs;
};

/// Analytic vector field with its gradient (grad(i, j) = d u_i / d x_j).
struct VectorFunction {
  std::function<Eigen::Vector2d(const Point&)> value;
  std::function<Tensor2(const Point&)> gradient;
};

using ScalarFunction = std::function<double(const Point&)>;

/// Scalar shape functions of the MINI element on one cell: the three
/// barycentric coordinates and the bubble 27 l0 l1 l2.
struct LocalBasis {
  Eigen::Vector4d values;
  Eigen::Matrix<double, 4, 2> gradients;
};

/// Mixed finite element spaces on a mesh.
///
/// Velocity (full layout): 2 * #vertices nodal coefficients (vertex v,
/// component c at 2v + c) followed by 2 * #cells bubble coefficients (cell T,
/// component c at 2V + 2T + c). Nodal dofs of boundary vertices are
/// constrained to zero and eliminated: all assembled velocity matrices and
/// vectors use the "free" numbering. Pressure: one P1 coefficient per vertex.
class FeSystem {
public:
  explicit FeSystem(Mesh mesh);

  const Mesh& mesh() const { return mesh_; }

  int num_velocity_dofs() const { return 2 * (mesh_.num_vertices() + mesh_.num_cells()); }
  int num_free_velocity_dofs() const { return static_cast<int>(free_to_full_.size()); }
  int num_pressure_dofs() const { return mesh_.num_vertices(); }

  int nodal_dof(int vertex, int component) const { return 2 * vertex + component; }
  int bubble_dof(int cell, int component) const { return 2 * (mesh_.num_vertices() + cell) + component; }

  /// Free index of a full velocity dof, or -1 if constrained.
  int free_index(int full) const { return full_to_free_[full]; }
  int full_index(int free) const { return free_to_full_[free]; }

  /// Full velocity dofs of a cell, ordered (node k, component c) -> 2k + c,
  /// with the bubble as node 3.
  std::array<int, 8> cell_dofs(int cell) const;

  Vector restrict_to_free(const Field& u) const;
  Field extend_from_free(const Vector& free) const;
  Field zero_velocity() const;
  Field zero_pressure() const;

  /// Gradients of the barycentric coordinates of a cell (row k = grad l_k).
  const Eigen::Matrix<double, 3, 2>& barycentric_gradients(int cell) const { return bary_grads_[cell]; }

  LocalBasis basis(int cell, const Eigen::Vector3d& bary) const;
  Point to_physical(int cell, const Eigen::Vector3d& bary) const;

  /// Velocity coefficients of one cell as columns (node 0..2, bubble).
  Eigen::Matrix<double, 2, 4> local_coefficients(int cell, const Field& u) const;

  // Assembled constants, all in the free velocity numbering.
  const SparseMatrix& mass() const { return mass_; }
  const SparseMatrix& divergence() const { return divergence_; }
  const SparseMatrix& stiffness() const { return stiffness_; }
  const SparseMatrix& pressure_mass() const { return pressure_mass_; }
  /// m_i = int eta_i dx; m . q = 0 is the zero-mean condition.
  const Vector& pressure_mean_weights() const { return pressure_mean_; }

  /// Velocity sparsity pattern (free x free) with all values zero, and for
  /// each cell the value-array offsets of its 8 x 8 local block (-1 where a
  /// dof is constrained). Local entry (i, j) sits at index 8 i + j.
  const SparseMatrix& velocity_pattern() const { return pattern_; }
  const std::array<int, 64>& cell_offsets(int cell) const { return offsets_[cell]; }

private:
  void build_pattern();

  Mesh mesh_;
  std::vector<int> full_to_free_;
  std::vector<int> free_to_full_;
  std::vector<Eigen::Matrix<double, 3, 2>> bary_grads_;
  SparseMatrix pattern_;
  std::vector<std::array<int, 64>> offsets_;
  SparseMatrix mass_;
  SparseMatrix divergence_;
  SparseMatrix stiffness_;
  SparseMatrix pressure_mass_;
  Vector pressure_mean_;
};

/// Velocity value and gradient of a field at a point of a cell.
struct PointValue {
  Eigen::Vector2d u;
  Tensor2 grad;
};
PointValue evaluate(const FeSystem& sys, const Eigen::Matrix<double, 2, 4>& local, const LocalBasis& basis);

/// Pressure value at a barycentric point.
double evaluate_pressure(const FeSystem& sys, const Field& q, int cell, const Eigen::Vector3d& bary);

/// Discrete L2 norm of a velocity field (exact, via the mass matrix).
double l2_norm(const FeSystem& sys, const Field& u);

/// || F(D u_h) ||_{L2}^2 with the assembly rule.
double f_energy(const FeSystem& sys, const PStructure& ps, const Field& u);

/// Coordinate text export, one `i j value` line per stored entry.
void write_coordinate(std::ostream& os, const SparseMatrix& a);

}  // namespace pstokes

#endif

#include "pstokes/fe_system.hpp"
#include "pstokes/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace pstokes {

FeSystem::FeSystem(Mesh mesh) : mesh_(std::move(mesh))
{
  const int nv = mesh_.num_vertices();
  full_to_free_.assign(num_velocity_dofs(), -1);
  for (int full = 0; full < num_velocity_dofs(); ++full) {
    const bool constrained = full < 2 * nv && mesh_.is_boundary(full / 2);
    if (!constrained) {
      full_to_free_[full] = static_cast<int>(free_to_full_.size());
      free_to_full_.push_back(full);
    }
  }

  bary_grads_.resize(mesh_.num_cells());
  for (int c = 0; c < mesh_.num_cells(); ++c) {
    const Cell& t = mesh_.cell(c);
    Eigen::Matrix2d jac;
    jac.col(0) = mesh_.vertex(t[1]) - mesh_.vertex(t[0]);
    jac.col(1) = mesh_.vertex(t[2]) - mesh_.vertex(t[0]);
    const Eigen::Matrix2d inv_t = jac.inverse().transpose();
    // grad l1, grad l2 are the columns of J^{-T}; grad l0 = -(grad l1 + grad l2)
    bary_grads_[c].row(1) = inv_t.col(0).transpose();
    bary_grads_[c].row(2) = inv_t.col(1).transpose();
    bary_grads_[c].row(0) = -(bary_grads_[c].row(1) + bary_grads_[c].row(2));
  }

  build_pattern();
  mass_ = assemble_mass(*this);
  stiffness_ = assemble_stiffness(*this);
  divergence_ = assemble_divergence(*this);

  std::vector<Eigen::Triplet<double>> trip;
  pressure_mean_ = Vector::Zero(nv);
  for (int c = 0; c < mesh_.num_cells(); ++c) {
    const Cell& t = mesh_.cell(c);
    const double a = mesh_.area(c);
    for (int i = 0; i < 3; ++i) {
      pressure_mean_[t[i]] += a / 3.0;
      for (int j = 0; j < 3; ++j)
        trip.emplace_back(t[i], t[j], a * (i == j ? 2.0 : 1.0) / 12.0);
    }
  }
  pressure_mass_.resize(nv, nv);
  pressure_mass_.setFromTriplets(trip.begin(), trip.end());
}

void FeSystem::build_pattern()
{
  const int n = num_free_velocity_dofs();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(64 * mesh_.num_cells());
  for (int c = 0; c < mesh_.num_cells(); ++c) {
    const auto dofs = cell_dofs(c);
    for (int i : dofs)
      for (int j : dofs)
        if (free_index(i) >= 0 && free_index(j) >= 0)
          trip.emplace_back(free_index(i), free_index(j), 0.0);
  }
  pattern_.resize(n, n);
  pattern_.setFromTriplets(trip.begin(), trip.end());
  pattern_.makeCompressed();

  offsets_.resize(mesh_.num_cells());
  const int* outer = pattern_.outerIndexPtr();
  const int* inner = pattern_.innerIndexPtr();
  for (int c = 0; c < mesh_.num_cells(); ++c) {
    const auto dofs = cell_dofs(c);
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j) {
        const int row = free_index(dofs[i]);
        const int col = free_index(dofs[j]);
        int offset = -1;
        if (row >= 0 && col >= 0) {
          const int* first = inner + outer[col];
          const int* last = inner + outer[col + 1];
          offset = static_cast<int>(std::lower_bound(first, last, row) - inner);
        }
        offsets_[c][8 * i + j] = offset;
      }
  }
}

std::array<int, 8> FeSystem::cell_dofs(int cell) const
{
  const Cell& t = mesh_.cell(cell);
  return {nodal_dof(t[0], 0), nodal_dof(t[0], 1), nodal_dof(t[1], 0), nodal_dof(t[1], 1),
          nodal_dof(t[2], 0), nodal_dof(t[2], 1), bubble_dof(cell, 0), bubble_dof(cell, 1)};
}

Vector FeSystem::restrict_to_free(const Field& u) const
{
  Vector out(num_free_velocity_dofs());
  for (int i = 0; i < out.size(); ++i)
    out[i] = u.coeffs[free_to_full_[i]];
  return out;
}

Field FeSystem::extend_from_free(const Vector& free) const
{
  Field u = zero_velocity();
  for (int i = 0; i < free.size(); ++i)
    u.coeffs[free_to_full_[i]] = free[i];
  return u;
}

Field FeSystem::zero_velocity() const { return {Space::velocity, Vector::Zero(num_velocity_dofs())}; }

Field FeSystem::zero_pressure() const { return {Space::pressure, Vector::Zero(num_pressure_dofs())}; }

LocalBasis FeSystem::basis(int cell, const Eigen::Vector3d& l) const
{
  const auto& g = bary_grads_[cell];
  LocalBasis b;
  b.values << l[0], l[1], l[2], 27.0 * l[0] * l[1] * l[2];
  b.gradients.topRows<3>() = g;
  b.gradients.row(3) = 27.0 * (l[1] * l[2] * g.row(0) + l[0] * l[2] * g.row(1) + l[0] * l[1] * g.row(2));
  return b;
}

Point FeSystem::to_physical(int cell, const Eigen::Vector3d& l) const
{
  const Cell& t = mesh_.cell(cell);
  return l[0] * mesh_.vertex(t[0]) + l[1] * mesh_.vertex(t[1]) + l[2] * mesh_.vertex(t[2]);
}

Eigen::Matrix<double, 2, 4> FeSystem::local_coefficients(int cell, const Field& u) const
{
  const auto dofs = cell_dofs(cell);
  Eigen::Matrix<double, 2, 4> local;
  for (int k = 0; k < 4; ++k)
    for (int c = 0; c < 2; ++c)
      local(c, k) = u.coeffs[dofs[2 * k + c]];
  return local;
}

PointValue evaluate(const FeSystem&, const Eigen::Matrix<double, 2, 4>& local, const LocalBasis& basis)
{
  return {local * basis.values, local * basis.gradients};
}

double evaluate_pressure(const FeSystem& sys, const Field& q, int cell, const Eigen::Vector3d& l)
{
  const Cell& t = sys.mesh().cell(cell);
  return l[0] * q.coeffs[t[0]] + l[1] * q.coeffs[t[1]] + l[2] * q.coeffs[t[2]];
}

double l2_norm(const FeSystem& sys, const Field& u)
{
  const Vector free = sys.restrict_to_free(u);
  return std::sqrt(std::max(0.0, free.dot(sys.mass() * free)));
}

double f_energy(const FeSystem& sys, const PStructure& ps, const Field& u)
{
  const QuadratureRule& rule = assembly_rule();
  double sum = 0.0;
  for (int c = 0; c < sys.mesh().num_cells(); ++c) {
    const auto local = sys.local_coefficients(c, u);
    double cell_sum = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Tensor2 grad = local * sys.basis(c, rule.points[q]).gradients;
      cell_sum += rule.weights[q] * nfunc::fmap(ps, grad).squaredNorm();
    }
    sum += sys.mesh().area(c) * cell_sum;
  }
  return sum;
}

void write_coordinate(std::ostream& os, const SparseMatrix& a)
{
  os.precision(17);
  for (int k = 0; k < a.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(a, k); it; ++it)
      os << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
}

}  // namespace pstokes

#include "pstokes/assembly.hpp"

#include <array>

namespace pstokes {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

// Symmetric gradients of the 8 local velocity shape functions.
std::array<Tensor2, 8> local_strains(const LocalBasis& b)
{
  std::array<Tensor2, 8> e;
  for (int k = 0; k < 4; ++k)
    for (int c = 0; c < 2; ++c) {
      Tensor2 g = Tensor2::Zero();
      g.row(c) = b.gradients.row(k);
      e[2 * k + c] = symmetric_part(g);
    }
  return e;
}

int index_of(const FeSystem& sys, int full, Constraints constraints)
{
  return constraints == Constraints::keep ? full : sys.free_index(full);
}

// Scatter an 8 x 8 local matrix into values laid out like the velocity pattern.
void scatter(const FeSystem& sys, int cell, const Eigen::Matrix<double, 8, 8>& local, double* values)
{
  const auto& offsets = sys.cell_offsets(cell);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      if (offsets[8 * i + j] >= 0)
        values[offsets[8 * i + j]] += local(i, j);
}

void scatter_vector(const FeSystem& sys, int cell, const Eigen::Matrix<double, 8, 1>& local, Vector& out)
{
  const auto dofs = sys.cell_dofs(cell);
  for (int i = 0; i < 8; ++i) {
    const int row = sys.free_index(dofs[i]);
    if (row >= 0)
      out[row] += local[i];
  }
}

}  // namespace

SparseMatrix assemble_mass(const FeSystem& sys, Constraints constraints)
{
  const QuadratureRule& rule = assembly_rule();
  const bool keep = constraints == Constraints::keep;
  SparseMatrix m;
  Triplets trip;
  if (keep) {
    m.resize(sys.num_velocity_dofs(), sys.num_velocity_dofs());
    trip.reserve(32 * sys.mesh().num_cells());
  } else {
    m = sys.velocity_pattern();
  }
  for (int c = 0; c < sys.mesh().num_cells(); ++c) {
    Eigen::Matrix4d scalar = Eigen::Matrix4d::Zero();
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const LocalBasis b = sys.basis(c, rule.points[q]);
      scalar += rule.weights[q] * b.values * b.values.transpose();
    }
    scalar *= sys.mesh().area(c);
    Eigen::Matrix<double, 8, 8> local = Eigen::Matrix<double, 8, 8>::Zero();
    for (int k = 0; k < 4; ++k)
      for (int l = 0; l < 4; ++l)
        for (int comp = 0; comp < 2; ++comp)
          local(2 * k + comp, 2 * l + comp) = scalar(k, l);
    if (!keep) {
      scatter(sys, c, local, m.valuePtr());
      continue;
    }
    const auto dofs = sys.cell_dofs(c);
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j)
        if (local(i, j) != 0.0)
          trip.emplace_back(dofs[i], dofs[j], local(i, j));
  }
  if (keep)
    m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

SparseMatrix assemble_stiffness(const FeSystem& sys)
{
  const QuadratureRule& rule = assembly_rule();
  SparseMatrix a = sys.velocity_pattern();
  double* values = a.valuePtr();
  for (int c = 0; c < sys.mesh().num_cells(); ++c) {
    Eigen::Matrix<double, 8, 8> local = Eigen::Matrix<double, 8, 8>::Zero();
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto e = local_strains(sys.basis(c, rule.points[q]));
      for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j)
          local(i, j) += rule.weights[q] * frobenius(e[i], e[j]);
    }
    local *= sys.mesh().area(c);
    scatter(sys, c, local, values);
  }
  return a;
}

SparseMatrix assemble_divergence(const FeSystem& sys, Constraints constraints)
{
  const QuadratureRule& rule = assembly_rule();
  const int cols = constraints == Constraints::keep ? sys.num_velocity_dofs() : sys.num_free_velocity_dofs();
  Triplets trip;
  trip.reserve(24 * sys.mesh().num_cells());
  for (int c = 0; c < sys.mesh().num_cells(); ++c) {
    // local(i, 2k + comp) = int l_i d_comp N_k
    Eigen::Matrix<double, 3, 8> local = Eigen::Matrix<double, 3, 8>::Zero();
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Eigen::Vector3d& l = rule.points[q];
      const LocalBasis b = sys.basis(c, l);
      for (int k = 0; k < 4; ++k)
        for (int comp = 0; comp < 2; ++comp)
          local.col(2 * k + comp) += rule.weights[q] * b.gradients(k, comp) * l;
    }
    local *= sys.mesh().area(c);
    const Cell& t = sys.mesh().cell(c);
    const auto dofs = sys.cell_dofs(c);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 8; ++j) {
        const int col = index_of(sys, dofs[j], constraints);
        if (col >= 0)
          trip.emplace_back(t[i], col, local(i, j));
      }
  }
  SparseMatrix b(sys.num_pressure_dofs(), cols);
  b.setFromTriplets(trip.begin(), trip.end());
  return b;
}

Vector assemble_stress_residual(const FeSystem& sys, const PStructure& ps, const Field& u)
{
  const QuadratureRule& rule = assembly_rule();
  Vector r = Vector::Zero(sys.num_free_velocity_dofs());
  for (int c = 0; c < sys.mesh().num_cells(); ++c) {
    const auto coeffs = sys.local_coefficients(c, u);
    Eigen::Matrix<double, 2, 4> local = Eigen::Matrix<double, 2, 4>::Zero();
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const LocalBasis b = sys.basis(c, rule.points[q]);
      const Tensor2 s = nfunc::stress(ps, coeffs * b.gradients);
      // S : D(e_comp N_k) = (S grad N_k)_comp
      local += rule.weights[q] * s * b.gradients.transpose();
    }
    local *= sys.mesh().area(c);
    Eigen::Matrix<double, 8, 1> flat;
    for (int k = 0; k < 4; ++k)
      for (int comp = 0; comp < 2; ++comp)
        flat[2 * k + comp] = local(comp, k);
    scatter_vector(sys, c, flat, r);
  }
  return r;
}

SparseMatrix assemble_stress_jacobian(const FeSystem& sys, const PStructure& ps, const Field& u,
                                      double jac_floor)
{
  const QuadratureRule& rule = assembly_rule();
  SparseMatrix a = sys.velocity_pattern();
  double* values = a.valuePtr();
  for (int c = 0; c < sys.mesh().num_cells(); ++c) {
    const auto coeffs = sys.local_coefficients(c, u);
    Eigen::Matrix<double, 8, 8> local = Eigen::Matrix<double, 8, 8>::Zero();
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const LocalBasis b = sys.basis(c, rule.points[q]);
      const Tensor2 grad = coeffs * b.gradients;
      const auto [secant, radial] = nfunc::stress_derivative_coefficients(ps, grad, jac_floor);
      const Tensor2 psym = symmetric_part(grad);
      const auto e = local_strains(b);
      Eigen::Matrix<double, 8, 1> proj;
      for (int i = 0; i < 8; ++i)
        proj[i] = frobenius(psym, e[i]);
      for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j)
          local(i, j) += rule.weights[q] * (secant * frobenius(e[i], e[j]) + radial * proj[i] * proj[j]);
    }
    local *= sys.mesh().area(c);
    scatter(sys, c, local, values);
  }
  return a;
}

double stress_energy(const FeSystem& sys, const PStructure& ps, const Field& u)
{
  const QuadratureRule& rule = assembly_rule();
  double sum = 0.0;
  for (int c = 0; c < sys.mesh().num_cells(); ++c) {
    const auto coeffs = sys.local_coefficients(c, u);
    double cell_sum = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Tensor2 grad = coeffs * sys.basis(c, rule.points[q]).gradients;
      cell_sum += rule.weights[q] * nfunc::phi(ps, symmetric_part(grad).norm());
    }
    sum += sys.mesh().area(c) * cell_sum;
  }
  return sum;
}

Vector assemble_load(const FeSystem& sys, const std::function<Eigen::Vector2d(const Point&)>& f,
                     const QuadratureRule& rule)
{
  Vector r = Vector::Zero(sys.num_free_velocity_dofs());
  for (int c = 0; c < sys.mesh().num_cells(); ++c) {
    Eigen::Matrix<double, 2, 4> local = Eigen::Matrix<double, 2, 4>::Zero();
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Eigen::Vector3d& l = rule.points[q];
      const LocalBasis b = sys.basis(c, l);
      local += rule.weights[q] * f(sys.to_physical(c, l)) * b.values.transpose();
    }
    local *= sys.mesh().area(c);
    Eigen::Matrix<double, 8, 1> flat;
    for (int k = 0; k < 4; ++k)
      for (int comp = 0; comp < 2; ++comp)
        flat[2 * k + comp] = local(comp, k);
    scatter_vector(sys, c, flat, r);
  }
  return r;
}

Vector assemble_stress_load(const FeSystem& sys, const PStructure& ps,
                            const std::function<Tensor2(const Point&)>& gradient,
                            const QuadratureRule& rule)
{
  Vector r = Vector::Zero(sys.num_free_velocity_dofs());
  for (int c = 0; c < sys.mesh().num_cells(); ++c) {
    Eigen::Matrix<double, 2, 4> local = Eigen::Matrix<double, 2, 4>::Zero();
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Eigen::Vector3d& l = rule.points[q];
      const LocalBasis b = sys.basis(c, l);
      const Tensor2 s = nfunc::stress(ps, gradient(sys.to_physical(c, l)));
      local += rule.weights[q] * s * b.gradients.transpose();
    }
    local *= sys.mesh().area(c);
    Eigen::Matrix<double, 8, 1> flat;
    for (int k = 0; k < 4; ++k)
      for (int comp = 0; comp < 2; ++comp)
        flat[2 * k + comp] = local(comp, k);
    scatter_vector(sys, c, flat, r);
  }
  return r;
}

}  // namespace pstokes

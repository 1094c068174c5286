#include "pstokes/interpolation.hpp"

#include <algorithm>

namespace pstokes {

namespace {

// int_T w dx with the refined analytic rule
Eigen::Vector2d cell_integral(const FeSystem& sys, const VectorFunction& w, int cell)
{
  const QuadratureRule& rule = analytic_rule();
  Eigen::Vector2d sum = Eigen::Vector2d::Zero();
  for (std::size_t q = 0; q < rule.size(); ++q)
    sum += rule.weights[q] * w.value(sys.to_physical(cell, rule.points[q]));
  return sys.mesh().area(cell) * sum;
}

}  // namespace

Field scott_zhang(const FeSystem& sys, const VectorFunction& w)
{
  const Mesh& mesh = sys.mesh();
  const QuadratureRule& rule = analytic_rule();
  // P1 mass matrix on a cell divided by |T|
  Eigen::Matrix3d local_mass;
  local_mass << 2, 1, 1, 1, 2, 1, 1, 1, 2;
  local_mass /= 12.0;
  const Eigen::Matrix3d inv_mass = local_mass.inverse();

  Field u = sys.zero_velocity();
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (mesh.is_boundary(v))
      continue;
    const int cell = mesh.vertex_cells(v).front();
    Eigen::Matrix<double, 3, 2> rhs = Eigen::Matrix<double, 3, 2>::Zero();
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Eigen::Vector3d& l = rule.points[q];
      rhs += rule.weights[q] * l * w.value(sys.to_physical(cell, l)).transpose();
    }
    const Eigen::Matrix<double, 3, 2> proj = inv_mass * rhs;
    const Cell& t = mesh.cell(cell);
    const int k = static_cast<int>(std::find(t.begin(), t.end(), v) - t.begin());
    u.coeffs[sys.nodal_dof(v, 0)] = proj(k, 0);
    u.coeffs[sys.nodal_dof(v, 1)] = proj(k, 1);
  }
  return u;
}

Field interp_div(const FeSystem& sys, const VectorFunction& w)
{
  const Mesh& mesh = sys.mesh();
  Field u = scott_zhang(sys, w);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const Cell& t = mesh.cell(c);
    // mean over T of the P1 part is the average of the vertex values
    Eigen::Vector2d sz_mean = Eigen::Vector2d::Zero();
    for (int v : t)
      sz_mean += Eigen::Vector2d(u.coeffs[sys.nodal_dof(v, 0)], u.coeffs[sys.nodal_dof(v, 1)]);
    sz_mean /= 3.0;
    const Eigen::Vector2d w_mean = cell_integral(sys, w, c) / mesh.area(c);
    const Eigen::Vector2d correction = (sz_mean - w_mean) / kBubbleMean;
    u.coeffs[sys.bubble_dof(c, 0)] = -correction[0];
    u.coeffs[sys.bubble_dof(c, 1)] = -correction[1];
  }
  return u;
}

Field interp_pressure(const FeSystem& sys, const ScalarFunction& q)
{
  const Mesh& mesh = sys.mesh();
  const QuadratureRule& rule = analytic_rule();
  std::vector<double> cell_int(mesh.num_cells());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    double sum = 0.0;
    for (std::size_t k = 0; k < rule.size(); ++k)
      sum += rule.weights[k] * q(sys.to_physical(c, rule.points[k]));
    cell_int[c] = mesh.area(c) * sum;
  }
  Field p = sys.zero_pressure();
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    double integral = 0.0, area = 0.0;
    for (int c : mesh.vertex_cells(v)) {
      integral += cell_int[c];
      area += mesh.area(c);
    }
    p.coeffs[v] = integral / area;
  }
  return p;
}

}  // namespace pstokes

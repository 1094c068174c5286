#ifndef PSTOKES_QUADRATURE_HPP
#define PSTOKES_QUADRATURE_HPP

#include <Eigen/Dense>

#include <vector>

namespace pstokes {

/// Quadrature rule on a triangle in barycentric coordinates. Weights sum to 1,
/// so sum_q w_q f(x_q) * |T| approximates the integral over T.
struct QuadratureRule {
  std::vector<Eigen::Vector3d> points;
  std::vector<double> weights;
  int degree = 0;

  std::size_t size() const { return weights.size(); }
};

/// Rule exact for all polynomials of total degree <= `degree` (2..10).
/// Degree 6 returns the 12-point fully symmetric rule; other degrees a
/// collapsed Gauss-Legendre product rule.
QuadratureRule quadrature(int degree);

/// The 12-point symmetric degree-6 rule used for all assembly.
const QuadratureRule& assembly_rule();

/// `base` applied on each of the four subtriangles of one uniform
/// refinement. Used for integrals of non-polynomial data.
QuadratureRule refined(const QuadratureRule& base);

/// assembly_rule() composed with one refinement.
const QuadratureRule& analytic_rule();

/// Gauss-Legendre nodes/weights on [0, 1] (weights sum to 1).
struct LineRule {
  std::vector<double> points;
  std::vector<double> weights;
};
LineRule gauss_legendre(int n);

}  // namespace pstokes

#endif

#ifndef PSTOKES_MANUFACTURED_HPP
#define PSTOKES_MANUFACTURED_HPP

#include "pstokes/fe_system.hpp"
#include "pstokes/time_stepping.hpp"

#include <string>

namespace pstokes {

/// Exact solution (u, q) of the unsteady system with forcing f computed from it.
struct ManufacturedSolution {
  std::string id;
  std::function<Eigen::Vector2d(double, const Point&)> u;
  std::function<Tensor2(double, const Point&)> grad_u;
  std::function<double(double, const Point&)> q;
  SpaceTimeFunction f;
  std::string notes;

  /// u(t, .) as an analytic field.
  VectorFunction at(double t) const;
};

/// Known ids: "stream1". Throws std::invalid_argument for anything else, and
/// std::logic_error if the constructed solution fails its sanity checks
/// (divergence, boundary trace, pressure mean).
ManufacturedSolution manufactured(const std::string& id, const PStructure& ps);

/// Pieces of the stream1 solution, exposed for independent checks.
namespace stream1 {

/// g(t) = 1 + t / 2.
double time_factor(double t);

/// psi = x^2 (1-x)^2 y^2 (1-y)^2 and curl psi = (d_y psi, -d_x psi).
double stream_function(const Point& x);
Eigen::Vector2d curl(const Point& x);
Tensor2 curl_gradient(const Point& x);
/// Laplacian of curl psi.
Eigen::Vector2d curl_laplacian(const Point& x);

/// div S evaluated by fourth-order finite differences of x -> S(grad(x)),
/// one-sided within two steps of the unit square boundary.
Eigen::Vector2d stress_divergence(const PStructure& ps, const std::function<Tensor2(const Point&)>& grad,
                                  const Point& x, double step = 1e-4);

}  // namespace stream1

}  // namespace pstokes

#endif

#include "pstokes/manufactured.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace pstokes {

VectorFunction ManufacturedSolution::at(double t) const
{
  return {[u = u, t](const Point& x) { return u(t, x); }, [g = grad_u, t](const Point& x) { return g(t, x); }};
}

namespace stream1 {
namespace {

// X(s) = s^2 (1 - s)^2 and its derivatives
double x0(double s) { return s * s * (1 - s) * (1 - s); }
double x1(double s) { return 2 * s * (1 - s) * (1 - 2 * s); }
double x2(double s) { return 2 * (1 - 6 * s + 6 * s * s); }
double x3(double s) { return 12 * (2 * s - 1); }

}  // namespace

double time_factor(double t) { return 1.0 + 0.5 * t; }

double stream_function(const Point& p) { return x0(p.x()) * x0(p.y()); }

Eigen::Vector2d curl(const Point& p)
{
  return {x0(p.x()) * x1(p.y()), -x1(p.x()) * x0(p.y())};
}

Tensor2 curl_gradient(const Point& p)
{
  const double x = p.x(), y = p.y();
  Tensor2 g;
  g << x1(x) * x1(y), x0(x) * x2(y), -x2(x) * x0(y), -x1(x) * x1(y);
  return g;
}

Eigen::Vector2d curl_laplacian(const Point& p)
{
  const double x = p.x(), y = p.y();
  return {x2(x) * x1(y) + x0(x) * x3(y), -x3(x) * x0(y) - x1(x) * x2(y)};
}

Eigen::Vector2d stress_divergence(const PStructure& ps, const std::function<Tensor2(const Point&)>& grad,
                                  const Point& x, double h)
{
  auto s = [&](const Point& y) { return nfunc::stress(ps, grad(y)); };
  // d/dx_dir of S(.) at x
  auto derivative = [&](int dir) -> Tensor2 {
    Point e = Point::Zero();
    e[dir] = h;
    const double coord = x[dir];
    if (coord < 2 * h) {
      return (-25 * s(x) + 48 * s(x + e) - 36 * s(x + 2 * e) + 16 * s(x + 3 * e) - 3 * s(x + 4 * e)) / (12 * h);
    }
    if (coord > 1 - 2 * h) {
      return (25 * s(x) - 48 * s(x - e) + 36 * s(x - 2 * e) - 16 * s(x - 3 * e) + 3 * s(x - 4 * e)) / (12 * h);
    }
    return (-s(x + 2 * e) + 8 * s(x + e) - 8 * s(x - e) + s(x - 2 * e)) / (12 * h);
  };
  const Tensor2 dx = derivative(0);
  const Tensor2 dy = derivative(1);
  return {dx(0, 0) + dy(0, 1), dx(1, 0) + dy(1, 1)};
}

}  // namespace stream1

namespace {

void check_stream1(const ManufacturedSolution& sol)
{
  std::mt19937_64 rng(20240501);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const Point x(unit(rng), unit(rng));
    const double t = unit(rng);
    if (std::abs(sol.grad_u(t, x).trace()) > 1e-10)
      throw std::logic_error("manufactured: velocity is not divergence-free");
  }
  for (int i = 0; i <= 64; ++i) {
    const double s = i / 64.0;
    for (const Point& x : {Point(s, 0.0), Point(s, 1.0), Point(0.0, s), Point(1.0, s)})
      if (sol.u(0.5, x).norm() > 1e-12)
        throw std::logic_error("manufactured: velocity does not vanish on the boundary");
  }
  // pressure mean by a 32 x 32 Gauss product rule
  const LineRule line = gauss_legendre(8);
  double mean = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (std::size_t i = 0; i < line.points.size(); ++i)
        for (std::size_t j = 0; j < line.points.size(); ++j) {
          const Point x((a + line.points[i]) / 4.0, (b + line.points[j]) / 4.0);
          mean += line.weights[i] * line.weights[j] * sol.q(0.3, x) / 16.0;
        }
  if (std::abs(mean) > 1e-10)
    throw std::logic_error("manufactured: pressure does not have zero mean");
}

}  // namespace

ManufacturedSolution manufactured(const std::string& id, const PStructure& ps)
{
  if (id != "stream1")
    throw std::invalid_argument("manufactured: unknown solution id '" + id + "'");

  ManufacturedSolution sol;
  sol.id = id;
  sol.notes = "u = (1 + t/2) curl(x^2(1-x)^2 y^2(1-y)^2), q = (1 + t/2) sin(2 pi x) cos(2 pi y); polynomial in x";
  sol.u = [](double t, const Point& x) -> Eigen::Vector2d { return stream1::time_factor(t) * stream1::curl(x); };
  sol.grad_u = [](double t, const Point& x) -> Tensor2 {
    return stream1::time_factor(t) * stream1::curl_gradient(x);
  };
  sol.q = [](double t, const Point& x) {
    return stream1::time_factor(t) * std::sin(2 * std::numbers::pi * x.x()) * std::cos(2 * std::numbers::pi * x.y());
  };
  sol.f = [ps](double t, const Point& x) -> Eigen::Vector2d {
    const double g = stream1::time_factor(t);
    const double k = 2 * std::numbers::pi;
    const Eigen::Vector2d grad_q(g * k * std::cos(k * x.x()) * std::cos(k * x.y()),
                                 -g * k * std::sin(k * x.x()) * std::sin(k * x.y()));
    const auto grad = [g](const Point& y) -> Tensor2 { return g * stream1::curl_gradient(y); };
    return 0.5 * stream1::curl(x) - stream1::stress_divergence(ps, grad, x) + grad_q;
  };
  check_stream1(sol);
  return sol;
}

}  // namespace pstokes

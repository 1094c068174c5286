#include "pstokes/quadrature.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace pstokes {

namespace {

QuadratureRule symmetric_degree6()
{
  QuadratureRule rule;
  rule.degree = 6;
  auto add_orbit3 = [&](double a, double w) {
    const double b = 1.0 - 2.0 * a;
    rule.points.emplace_back(a, a, b);
    rule.points.emplace_back(a, b, a);
    rule.points.emplace_back(b, a, a);
    rule.weights.insert(rule.weights.end(), 3, w);
  };
  auto add_orbit6 = [&](double a, double b, double w) {
    const double c = 1.0 - a - b;
    const std::array<Eigen::Vector3d, 6> perms = {
        Eigen::Vector3d(a, b, c), Eigen::Vector3d(a, c, b), Eigen::Vector3d(b, a, c),
        Eigen::Vector3d(b, c, a), Eigen::Vector3d(c, a, b), Eigen::Vector3d(c, b, a)};
    rule.points.insert(rule.points.end(), perms.begin(), perms.end());
    rule.weights.insert(rule.weights.end(), 6, w);
  };
  add_orbit3(0.249286745170910421136, 0.116786275726379366030);
  add_orbit3(0.063089014491502228340, 0.050844906370206816921);
  add_orbit6(0.053145049844816947353, 0.310352451033784405417, 0.082851075618373575194);
  return rule;
}

QuadratureRule collapsed_gauss(int degree)
{
  // x = u (1 - v), y = v; the Jacobian (1 - v) adds one degree in v.
  const int n = (degree + 2) / 2 + 1;
  const LineRule line = gauss_legendre(n);
  QuadratureRule rule;
  rule.degree = degree;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double u = line.points[i];
      const double v = line.points[j];
      const double x = u * (1.0 - v);
      const double y = v;
      rule.points.emplace_back(1.0 - x - y, x, y);
      rule.weights.push_back(2.0 * line.weights[i] * line.weights[j] * (1.0 - v));
    }
  return rule;
}

}  // namespace

LineRule gauss_legendre(int n)
{
  if (n < 1)
    throw std::invalid_argument("gauss_legendre: need at least one point");
  LineRule rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16)
        break;
    }
    // map [-1, 1] -> [0, 1], ascending
    rule.points[n - 1 - i] = 0.5 * (x + 1.0);
    rule.weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

QuadratureRule quadrature(int degree)
{
  if (degree < 2 || degree > 10)
    throw std::invalid_argument("quadrature: unsupported degree " + std::to_string(degree));
  if (degree == 6)
    return symmetric_degree6();
  return collapsed_gauss(degree);
}

const QuadratureRule& assembly_rule()
{
  static const QuadratureRule rule = symmetric_degree6();
  return rule;
}

QuadratureRule refined(const QuadratureRule& base)
{
  const Eigen::Vector3d e0(1, 0, 0), e1(0, 1, 0), e2(0, 0, 1);
  const Eigen::Vector3d m01 = 0.5 * (e0 + e1), m12 = 0.5 * (e1 + e2), m02 = 0.5 * (e0 + e2);
  const std::array<std::array<Eigen::Vector3d, 3>, 4> sub = {{
      {e0, m01, m02}, {m01, e1, m12}, {m02, m12, e2}, {m01, m12, m02}}};
  QuadratureRule rule;
  rule.degree = base.degree;
  for (const auto& corners : sub)
    for (std::size_t q = 0; q < base.size(); ++q) {
      const Eigen::Vector3d& l = base.points[q];
      rule.points.push_back(l[0] * corners[0] + l[1] * corners[1] + l[2] * corners[2]);
      rule.weights.push_back(0.25 * base.weights[q]);
    }
  return rule;
}

const QuadratureRule& analytic_rule()
{
  static const QuadratureRule rule = refined(assembly_rule());
  return rule;
}

}  // namespace pstokes

#include "pstokes/nfunc.hpp"

#include <array>
#include <cmath>
#include <functional>

namespace pstokes {

PStructure::PStructure(double p, double delta) : p_(p), delta_(delta)
{
  if (!(p > 1.0) || !std::isfinite(p))
    throw std::invalid_argument("PStructure: p must satisfy p > 1, got " + std::to_string(p));
  if (!(delta >= 0.0 && delta <= 1.0))
    throw std::invalid_argument("PStructure: delta must lie in [0, 1], got " + std::to_string(delta));
}

namespace nfunc {
namespace {

// int_0^x (1 + y)^(q-2) y dy, i.e. phi for unit shift and exponent q.
double unit_shift_phi(double q, double x)
{
  if (x < 0.25) {
    // binomial series of (1 + y)^(q-2), integrated term by term
    double coeff = 1.0;
    double xk = x * x;
    double sum = 0.0;
    for (int k = 0; k < 80; ++k) {
      const double term = coeff * xk / (k + 2);
      sum += term;
      if (std::abs(term) <= 1e-18 * std::abs(sum))
        break;
      coeff *= (q - 2.0 - k) / (k + 1.0);
      xk *= x;
    }
    return sum;
  }
  const double l = std::log1p(x);
  return std::expm1(q * l) / q - std::expm1((q - 1.0) * l) / (q - 1.0);
}

// 5-point Gauss-Legendre on [-1, 1], exact to degree 9.
constexpr std::array<double, 5> kGaussNodes = {
    -0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831, 0.9061798459386640};
constexpr std::array<double, 5> kGaussWeights = {
    0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665,
    0.2369268850561891};
constexpr int kShiftPanels = 32;

double gauss_panel(const std::function<double(double)>& f, double a, double b)
{
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (std::size_t i = 0; i < kGaussNodes.size(); ++i)
    sum += kGaussWeights[i] * f(mid + half * kGaussNodes[i]);
  return half * sum;
}

// int_0^t f for an integrand that is smooth on [0, t] except for a branch
// point at s = -c (c >= 0). Panels are uniform when the branch point is far
// away and otherwise graded geometrically towards it; below 2^-16 (c + t) the
// remainder is one extra panel in s = left v^2, which absorbs a branch point
// sitting at s = 0.
double composite_gauss(const std::function<double(double)>& f, double t, double c)
{
  double sum = 0.0;
  if (c >= t) {
    const double width = t / kShiftPanels;
    for (int k = 0; k < kShiftPanels; ++k)
      sum += gauss_panel(f, k * width, (k + 1) * width);
    return sum;
  }
  const double hi = c + t;
  const double lo = std::max(c, std::ldexp(hi, -16));
  const double ratio = hi / lo;
  double left = lo - c;
  if (left > 0.0)
    sum += gauss_panel([&](double v) { return 2.0 * left * v * f(left * v * v); }, 0.0, 1.0);
  for (int k = 1; k <= kShiftPanels; ++k) {
    const double right = k == kShiftPanels ? t : lo * std::pow(ratio, static_cast<double>(k) / kShiftPanels) - c;
    sum += gauss_panel(f, left, right);
    left = right;
  }
  return sum;
}

// sup_{s >= 0} (s t - psi(s)) for a strictly increasing psi' with psi'(0) = 0.
double legendre_transform(const std::function<double(double)>& dpsi,
                          const std::function<double(double)>& psi, double t)
{
  if (t <= 0.0)
    return 0.0;
  double lo = 0.0;
  double hi = std::max(t, 1.0);
  while (dpsi(hi) < t)
    hi *= 2.0;
  for (int it = 0; it < 400 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (dpsi(mid) < t ? lo : hi) = mid;
  }
  const double s = 0.5 * (lo + hi);
  return std::max(0.0, s * t - psi(s));
}

}  // namespace

double phi_prime(const PStructure& ps, double s)
{
  if (s <= 0.0)
    return 0.0;
  return std::pow(ps.delta() + s, ps.p() - 2.0) * s;
}

double phi(const PStructure& ps, double t)
{
  if (t <= 0.0)
    return 0.0;
  const double p = ps.p();
  const double delta = ps.delta();
  if (delta == 0.0)
    return std::pow(t, p) / p;
  return std::pow(delta, p) * unit_shift_phi(p, t / delta);
}

double phi_second(const PStructure& ps, double t)
{
  const double p = ps.p();
  const double base = ps.delta() + t;
  if (base == 0.0) {
    if (p < 2.0)
      throw SingularEvaluation("phi'' is unbounded at t = 0 for delta = 0 and p < 2");
    return p == 2.0 ? 1.0 : 0.0;
  }
  return std::pow(base, p - 3.0) * (ps.delta() + (p - 1.0) * t);
}

double phi_shift_prime(const PStructure& ps, double a, double t)
{
  if (t <= 0.0)
    return 0.0;
  return phi_prime(ps, a + t) * t / (a + t);
}

double phi_shift(const PStructure& ps, double a, double t)
{
  if (t <= 0.0)
    return 0.0;
  return composite_gauss([&](double s) { return phi_shift_prime(ps, a, s); }, t, ps.delta() + a);
}

double phi_conjugate(const PStructure& ps, double t)
{
  return legendre_transform([&](double s) { return phi_prime(ps, s); },
                            [&](double s) { return phi(ps, s); }, t);
}

double phi_shift_conjugate(const PStructure& ps, double a, double t)
{
  return legendre_transform([&](double s) { return phi_shift_prime(ps, a, s); },
                            [&](double s) { return phi_shift(ps, a, s); }, t);
}

Tensor2 stress(const PStructure& ps, const Tensor2& P)
{
  const Tensor2 sym = symmetric_part(P);
  const double m = sym.norm();
  if (m == 0.0)
    return Tensor2::Zero();
  return std::pow(ps.delta() + m, ps.p() - 2.0) * sym;
}

Tensor2 fmap(const PStructure& ps, const Tensor2& P)
{
  const Tensor2 sym = symmetric_part(P);
  const double m = sym.norm();
  if (m == 0.0)
    return Tensor2::Zero();
  return std::pow(ps.delta() + m, 0.5 * (ps.p() - 2.0)) * sym;
}

StressDerivativeCoefficients stress_derivative_coefficients(const PStructure& ps, const Tensor2& P,
                                                            double jac_floor)
{
  const double p = ps.p();
  const double shift = std::max(ps.delta(), jac_floor);
  const double m = symmetric_part(P).norm();
  if (m == 0.0) {
    if (shift == 0.0) {
      if (p < 2.0)
        throw SingularEvaluation("dS(0) is unbounded for delta = 0 and p < 2 without a floor");
      return {p == 2.0 ? 1.0 : 0.0, 0.0};
    }
    return {std::pow(shift, p - 2.0), 0.0};
  }
  // phi''(m) - phi'(m)/m = (p-2) m (shift+m)^(p-3)
  return {std::pow(shift + m, p - 2.0), (p - 2.0) * std::pow(shift + m, p - 3.0) / m};
}

Tensor2 stress_derivative(const PStructure& ps, const Tensor2& P, const Tensor2& Q, double jac_floor)
{
  const auto [secant, radial] = stress_derivative_coefficients(ps, P, jac_floor);
  const Tensor2 psym = symmetric_part(P);
  const Tensor2 qsym = symmetric_part(Q);
  return secant * qsym + radial * frobenius(psym, qsym) * psym;
}

EquivalenceRatios equivalence_ratios(const PStructure& ps, const Tensor2& P, const Tensor2& Q)
{
  const Tensor2 psym = symmetric_part(P);
  const Tensor2 qsym = symmetric_part(Q);
  const double gap = (psym - qsym).norm();
  if (gap == 0.0)
    throw std::invalid_argument("equivalence_ratios: P^sym and Q^sym coincide");
  EquivalenceRatios r;
  r.monotonicity = frobenius(stress(ps, P) - stress(ps, Q), P - Q);
  r.f_distance = (fmap(ps, P) - fmap(ps, Q)).squaredNorm();
  r.shifted = phi_shift(ps, psym.norm(), gap);
  r.second_order = phi_second(ps, psym.norm() + qsym.norm()) * gap * gap;
  return r;
}

}  // namespace nfunc
}  // namespace pstokes

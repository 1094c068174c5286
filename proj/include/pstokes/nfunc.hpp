#ifndef PSTOKES_NFUNC_HPP
#define PSTOKES_NFUNC_HPP

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace pstokes {

/// 2x2 real tensor (velocity gradients, strain rates, stresses).
using Tensor2 = Eigen::Matrix2d;

inline Tensor2 symmetric_part(const Tensor2& a) { return 0.5 * (a + a.transpose()); }

/// Frobenius product A:B.
inline double frobenius(const Tensor2& a, const Tensor2& b) { return (a.array() * b.array()).sum(); }

inline double hs_norm(const Tensor2& a) { return a.norm(); }

/// Raised when a quantity is evaluated at a point where it is unbounded
/// (the second derivative of phi at the origin for p < 2, delta = 0).
class SingularEvaluation : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// The (p, delta) pair fixing the N-function phi, the stress S and the map F.
class PStructure {
public:
  PStructure(double p, double delta);

  double p() const { return p_; }
  double delta() const { return delta_; }

  /// Conjugate exponent p' = p / (p - 1).
  double p_conj() const { return p_ / (p_ - 1.0); }

  bool operator==(const PStructure&) const = default;

private:
  double p_;
  double delta_;
};

namespace nfunc {

/// phi'(s) = (delta + s)^(p-2) s.
double phi_prime(const PStructure& ps, double s);

/// phi(t) = int_0^t phi'(s) ds, evaluated in closed form.
double phi(const PStructure& ps, double t);

/// phi''(t) = (delta + t)^(p-3) (delta + (p-1) t).
/// Throws SingularEvaluation at t = 0 when delta = 0 and p < 2.
double phi_second(const PStructure& ps, double t);

/// Derivative of the shifted function: phi_a'(t) = phi'(a + t) t / (a + t).
double phi_shift_prime(const PStructure& ps, double a, double t);

/// Shifted N-function phi_a(t), by composite Gauss-Legendre integration of
/// phi_shift_prime over [0, t].
double phi_shift(const PStructure& ps, double a, double t);

/// Legendre transform phi*(t) = sup_{s >= 0} (s t - phi(s)).
double phi_conjugate(const PStructure& ps, double t);

/// Conjugate of the shifted function, (phi_a)*(t).
double phi_shift_conjugate(const PStructure& ps, double a, double t);

/// S(P) = phi'(|P^sym|) / |P^sym| P^sym, S(P) = 0 when P^sym = 0.
Tensor2 stress(const PStructure& ps, const Tensor2& P);

/// F(P) = (delta + |P^sym|)^((p-2)/2) P^sym.
Tensor2 fmap(const PStructure& ps, const Tensor2& P);

/// Directional derivative dS(P)[Q].
///
/// Inside phi' and phi'' the shift delta is replaced by max(delta, jac_floor).
/// At P^sym = 0 the limit phi''(0) Q^sym is returned; if that limit is
/// unbounded (effective shift 0, p < 2) SingularEvaluation is thrown.
Tensor2 stress_derivative(const PStructure& ps, const Tensor2& P, const Tensor2& Q,
                          double jac_floor = 0.0);

/// dS(P)[Q] = secant * Q^sym + radial * (P^sym : Q^sym) P^sym.
struct StressDerivativeCoefficients {
  double secant;
  double radial;
};

/// Coefficients of stress_derivative at P, with the same flooring rule.
StressDerivativeCoefficients stress_derivative_coefficients(const PStructure& ps, const Tensor2& P,
                                                            double jac_floor = 0.0);

/// The four mutually equivalent quantities measuring the distance of P and Q.
struct EquivalenceRatios {
  double monotonicity;  ///< (S(P) - S(Q)) : (P - Q)
  double f_distance;    ///< |F(P) - F(Q)|^2
  double shifted;       ///< phi_{|P^sym|}(|P^sym - Q^sym|)
  double second_order;  ///< phi''(|P^sym| + |Q^sym|) |P^sym - Q^sym|^2
};

/// Throws std::invalid_argument if P^sym == Q^sym.
EquivalenceRatios equivalence_ratios(const PStructure& ps, const Tensor2& P, const Tensor2& Q);

}  // namespace nfunc
}  // namespace pstokes

#endif

#include "pstokes/nfunc.hpp"
#include "pstokes/properties.hpp"

#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

using namespace pstokes;
using namespace pstokes::nfunc;

namespace {

// Adaptive Simpson, used as an independent integration oracle.
double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
               double whole, double tol, int depth)
{
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6 * (fa + 4 * flm + fm);
  const double right = (b - m) / 6 * (fm + 4 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15 * tol)
    return left + right + (left + right - whole) / 15;
  return simpson(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         simpson(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b)
{
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return simpson(f, a, b, fa, fm, fb, (b - a) / 6 * (fa + 4 * fm + fb), 1e-15, 50);
}

// Closed-form phi for any shift d >= 0 (the shifted family needs d > 1).
double phi_closed(double p, double d, double t)
{
  return (std::pow(d + t, p) - std::pow(d, p)) / p - d * (std::pow(d + t, p - 1) - std::pow(d, p - 1)) / (p - 1);
}

}  // namespace

TEST_CASE("PStructure rejects parameters outside p > 1, delta in [0, 1]")
{
  CHECK_THROWS_AS(PStructure(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(PStructure(2.0, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(PStructure(2.0, 1.5), std::invalid_argument);
  CHECK(PStructure(1.5, 0.0).p_conj() == doctest::Approx(3.0));
}

TEST_CASE("phi_prime examples")
{
  CHECK(phi_prime({2, 0.7}, 3) == doctest::Approx(3).epsilon(1e-15));
  CHECK(phi_prime({1.5, 0}, 4) == doctest::Approx(2).epsilon(1e-15));
  CHECK(phi_prime({3, 1}, 1) == doctest::Approx(2).epsilon(1e-15));
  CHECK(phi_prime({1.5, 0}, 0) == 0.0);
}

TEST_CASE("phi examples and integral oracle")
{
  CHECK(phi({2, 0}, 3) == doctest::Approx(4.5).epsilon(1e-15));
  CHECK(phi({3, 1}, 1) == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
  const PStructure ps(3, 1);
  const double oracle = integrate([&](double s) { return phi_prime(ps, s); }, 0, 1);
  CHECK(std::abs(phi(ps, 1) - oracle) <= 1e-12);
  for (double p : {1.5, 2.0, 3.0})
    for (double d : {0.0, 0.01, 1.0}) {
      CHECK(phi({p, d}, 0) == 0.0);
      const PStructure q(p, d);
      const double ref = integrate([&](double s) { return phi_prime(q, s); }, 0, 1.7);
      CHECK(std::abs(phi(q, 1.7) - ref) <= 1e-10 * (1 + ref));
    }
}

TEST_CASE("phi_second examples, bounds and singular point")
{
  CHECK(phi_second({2, 0.3}, 1.7) == doctest::Approx(1));
  CHECK(phi_second({3, 0}, 2) == doctest::Approx(4));
  const PStructure ps(1.5, 0.5);
  CHECK(phi_second(ps, 0.5) == doctest::Approx(0.75).epsilon(1e-14));
  const double h = 1e-6;
  const double fd = (phi_prime(ps, 0.5 + h) - phi_prime(ps, 0.5 - h)) / (2 * h);
  CHECK(std::abs(fd - 0.75) <= 1e-5);
  CHECK_THROWS_AS(phi_second({1.5, 0}, 0), SingularEvaluation);
  CHECK_NOTHROW(phi_second({1.5, 0.01}, 0));
  CHECK_NOTHROW(phi_second({3, 0}, 0));

  for (double p : {1.5, 3.0})
    for (double t : {1e-3, 0.5, 4.0}) {
      const PStructure q(p, 0.2);
      const double base = std::pow(0.2 + t, p - 2);
      CHECK(phi_second(q, t) >= std::min(1.0, p - 1) * base * (1 - 1e-14));
      CHECK(phi_second(q, t) <= std::max(1.0, p - 1) * base * (1 + 1e-14));
    }
}

TEST_CASE("shifted N-function")
{
  CHECK(phi_shift_prime({1.5, 0.1}, 0, 0.8) == doctest::Approx(phi_prime({1.5, 0.1}, 0.8)).epsilon(1e-15));
  CHECK(phi_shift_prime({3, 0}, 0.4, 0) == 0.0);
  CHECK(phi_shift_prime({2, 0}, 1, 1) == doctest::Approx(1));
  CHECK(phi_shift_prime({1.5, 0}, 0, 0) == 0.0);

  // phi_a'(t) = (delta + a + t)^(p-2) t, so phi_a is phi with shift delta + a.
  for (double p : {1.5, 2.0, 3.0})
    for (double d : {0.0, 0.01, 1.0})
      for (double a : {0.0, 0.3, 2.5})
        for (double t : {0.0, 1e-3, 0.7, 3.0}) {
          const double want = phi_closed(p, d + a, t);
          CHECK(std::abs(phi_shift({p, d}, a, t) - want) <= 1e-12 * (1 + want));
        }
}

TEST_CASE("phi_conjugate examples and grid oracle")
{
  CHECK(phi_conjugate({2, 0}, 4) == doctest::Approx(8).epsilon(1e-12));
  CHECK(phi_conjugate({3, 0}, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  const PStructure ps(1.5, 0.2);
  const double t = 0.7;
  double grid_sup = 0.0;
  const int points = 1000000;
  for (int i = 0; i <= points; ++i) {
    const double s = 2.0 * i / points;
    grid_sup = std::max(grid_sup, s * t - phi(ps, s));
  }
  const double v = phi_conjugate(ps, t);
  CHECK(v >= grid_sup);
  CHECK(v <= grid_sup + 1e-8);
}

TEST_CASE("stress and F examples")
{
  Tensor2 P;
  P << 0.3, -1.2, 0.7, 2.1;
  for (double p : {1.5, 2.0, 3.0})
    CHECK(stress({p, 0.4}, Tensor2::Zero()).norm() == 0.0);
  CHECK((stress({2, 0.6}, P) - symmetric_part(P)).norm() <= 1e-15);
  CHECK((fmap({2, 0.6}, P) - symmetric_part(P)).norm() <= 1e-15);

  const Tensor2 D = Eigen::Vector2d(1, -1).asDiagonal();
  CHECK((stress({3, 0}, D) - std::sqrt(2.0) * D).norm() <= 1e-14);
  const Tensor2 D2 = Eigen::Vector2d(2, 0).asDiagonal();
  CHECK((fmap({4, 0}, D2) - Tensor2(Eigen::Vector2d(4, 0).asDiagonal())).norm() <= 1e-14);

  Tensor2 A;
  A << 0, 1.3, -1.3, 0;
  CHECK(fmap({1.5, 0}, A).norm() == 0.0);
  CHECK(stress({1.5, 0}, A).norm() == 0.0);

  // S(P) : P = |F(P)|^2 and both maps are symmetric.
  for (double p : {1.5, 3.0})
    for (double d : {0.0, 0.5}) {
      const PStructure ps(p, d);
      CHECK(std::abs(frobenius(stress(ps, P), P) - fmap(ps, P).squaredNorm()) <= 1e-13 * fmap(ps, P).squaredNorm());
      CHECK((stress(ps, P) - stress(ps, P).transpose()).norm() == 0.0);
    }
}

TEST_CASE("stress derivative")
{
  std::mt19937_64 rng(7);
  Tensor2 P = random_tensor(rng), Q = random_tensor(rng), R = random_tensor(rng);
  CHECK((stress_derivative({2, 0.3}, P, Q) - symmetric_part(Q)).norm() <= 1e-14);

  for (double p : {1.5, 3.0}) {
    const PStructure ps(p, 0.01);
    const double a = frobenius(stress_derivative(ps, P, Q), R);
    const double b = frobenius(stress_derivative(ps, P, R), Q);
    CHECK(std::abs(a - b) <= 1e-13 * (1 + std::abs(a)));

    std::vector<double> err;
    for (double eps : {1e-3, 1e-4, 1e-5})
      err.push_back(((stress(ps, P + eps * Q) - stress(ps, P)) / eps - stress_derivative(ps, P, Q)).norm());
    CHECK(err[1] < 0.2 * err[0]);
    CHECK(err[2] < 0.2 * err[1]);
    CHECK(err[0] < 1e-2);
  }

  CHECK_THROWS_AS(stress_derivative({1.5, 0}, Tensor2::Zero(), Q), SingularEvaluation);
  const Tensor2 floored = stress_derivative({1.5, 0}, Tensor2::Zero(), Q, 1e-7);
  CHECK((floored - std::pow(1e-7, -0.5) * symmetric_part(Q)).norm() <= 1e-9 * floored.norm());
}

TEST_CASE("equivalence ratios")
{
  std::mt19937_64 rng(11);
  const Tensor2 P = random_tensor(rng), Q = random_tensor(rng);
  const auto r2 = equivalence_ratios({2, 0}, P, Q);
  CHECK(r2.monotonicity == doctest::Approx(r2.f_distance).epsilon(1e-13));
  CHECK(r2.f_distance == doctest::Approx((symmetric_part(P) - symmetric_part(Q)).squaredNorm()).epsilon(1e-13));
  const auto r = equivalence_ratios({1.5, 0.01}, P, Q);
  CHECK(r.monotonicity > 0);
  CHECK(r.f_distance > 0);
  CHECK(r.shifted > 0);
  CHECK(r.second_order > 0);
  Tensor2 A;
  A << 0, 1, -1, 0;
  CHECK_THROWS_AS(equivalence_ratios({1.5, 0.01}, P, P + A), std::invalid_argument);
}

TEST_CASE("N-function property suite with frozen bands")
{
  for (double p : {1.5, 2.0, 3.0}) {
    const BandTable bands = BandTable::read_file(std::string(PSTOKES_FIXTURE_DIR) + "/" + band_file_name(p));
    for (double d : kSuiteDeltas) {
      const PropertyReport report = nfunc_properties({p, d}, bands, 2, 2000);
      CHECK(report.checks.size() >= 15);
      for (const Check& c : report.checks) {
        INFO(c.name << " value " << c.value << " limit " << c.limit);
        CHECK(c.pass);
      }
    }
  }
}

TEST_CASE("band table round trip")
{
  BandTable t;
  t.set("a", {0.5, 2.0});
  t.set("b", {1e-3, 1.25});
  std::stringstream ss;
  t.write(ss);
  const BandTable back = BandTable::read(ss);
  CHECK(back.at("a").lower == 0.5);
  CHECK(back.at("b").upper == 1.25);
  CHECK_THROWS_AS(back.at("c"), std::out_of_range);
  std::stringstream bad("x 1\n");
  CHECK_THROWS_AS(BandTable::read(bad), std::runtime_error);
  CHECK(band_file_name(1.5) == "nfunc_bands_p1.5.txt");
  CHECK(band_file_name(2) == "nfunc_bands_p2.txt");
}

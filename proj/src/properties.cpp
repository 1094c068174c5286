#include "pstokes/properties.hpp"
#include "pstokes/interpolation.hpp"
#include "pstokes/verify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace pstokes {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const std::vector<double> kNearDegenerate = {1e-1, 1e-4, 1e-8};

std::string format_number(double v)
{
  std::ostringstream os;
  os << v;
  return os.str();
}

std::string tag(const PStructure& ps)
{
  return "[p=" + format_number(ps.p()) + ",delta=" + format_number(ps.delta()) + "]";
}

std::string young_name(double eps) { return "young_eps_" + format_number(eps); }

// Running minimum and maximum of a sampled quantity.
struct Range {
  double lo = kInf;
  double hi = -kInf;
  void add(double v)
  {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
};

double log_uniform(std::mt19937_64& rng, double lo_exp, double hi_exp)
{
  return std::pow(10.0, std::uniform_real_distribution<double>(lo_exp, hi_exp)(rng));
}

// Random pairs: `samples` generic ones, then samples / 10 near-degenerate
// pairs for each distance in kNearDegenerate.
std::vector<std::pair<Tensor2, Tensor2>> tensor_pairs(std::mt19937_64& rng, int samples)
{
  std::vector<std::pair<Tensor2, Tensor2>> pairs;
  for (int k = 0; k < samples; ++k) {
    const Tensor2 p = random_tensor(rng);
    pairs.emplace_back(p, random_tensor(rng));
  }
  for (double dist : kNearDegenerate)
    for (int k = 0; k < samples / 10; ++k) {
      const Tensor2 p = random_tensor(rng);
      Tensor2 dir = symmetric_part(random_tensor(rng));
      dir /= dir.norm();
      pairs.emplace_back(p, p + dist * dir);
    }
  return pairs;
}

// Extremes of every calibrated N-function quantity for one (p, delta).
std::map<std::string, Range> sample_quantities(const PStructure& ps, std::mt19937_64& rng, int samples)
{
  std::map<std::string, Range> out;
  for (const auto& [p, q] : tensor_pairs(rng, samples)) {
    if ((symmetric_part(p) - symmetric_part(q)).norm() == 0.0)
      continue;
    const auto r = nfunc::equivalence_ratios(ps, p, q);
    out["pot15a_mono_over_f"].add(r.monotonicity / r.f_distance);
    out["pot15a_shifted_over_f"].add(r.shifted / r.f_distance);
    out["pot15a_second_over_f"].add(r.second_order / r.f_distance);

    const double m = symmetric_part(p).norm();
    if (m > 0.0) {
      const double f2 = nfunc::fmap(ps, p).squaredNorm();
      out["pot15b_sp_over_f"].add(frobenius(nfunc::stress(ps, p), p) / f2);
      out["pot15b_f_over_phi"].add(f2 / nfunc::phi(ps, m));
    }
  }
  for (int k = 0; k < samples; ++k) {
    const double t = log_uniform(rng, -4.0, 2.0);
    out["conjugate_over_phi"].add(nfunc::phi_conjugate(ps, nfunc::phi_prime(ps, t)) / nfunc::phi(ps, t));
  }
  for (int k = 0; k < samples; ++k) {
    const double s = log_uniform(rng, -3.0, 1.0);
    const double t = log_uniform(rng, -3.0, 1.0);
    const double a = log_uniform(rng, -3.0, 1.0);
    const double phi_a = nfunc::phi_shift(ps, a, s);
    const double conj = nfunc::phi_shift_conjugate(ps, a, t);
    for (double eps : kYoungEpsilons)
      out[young_name(eps)].add((s * t - eps * phi_a) / conj);
  }
  return out;
}

Check band_check(const std::string& name, const Range& r, const Band& b)
{
  Check c;
  c.name = name;
  c.pass = r.lo >= b.lower && r.hi <= b.upper;
  c.value = r.lo < b.lower ? r.lo : r.hi;
  c.limit = r.lo < b.lower ? b.lower : b.upper;
  c.detail = "observed [" + format_number(r.lo) + ", " + format_number(r.hi) + "] band [" +
             format_number(b.lower) + ", " + format_number(b.upper) + "]";
  return c;
}

Check bound_check(const std::string& name, double worst, double limit, const std::string& detail = "")
{
  return {name, worst <= limit, worst, limit, detail};
}

// Structured-mesh evaluation of a velocity field at an arbitrary point.
VectorFunction field_function(const FeSystem& sys, int n, const Field& u)
{
  auto locate = [&sys, n](const Point& x) {
    const int i = std::clamp(static_cast<int>(std::floor(x.x() * n)), 0, n - 1);
    const int j = std::clamp(static_cast<int>(std::floor(x.y() * n)), 0, n - 1);
    const double dx = x.x() * n - i;
    const double dy = x.y() * n - j;
    const int cell = 2 * (i + j * n) + (dx >= dy ? 0 : 1);
    const Cell& t = sys.mesh().cell(cell);
    const auto& g = sys.barycentric_gradients(cell);
    Eigen::Vector3d l;
    l[1] = g.row(1).dot(x - sys.mesh().vertex(t[0]));
    l[2] = g.row(2).dot(x - sys.mesh().vertex(t[0]));
    l[0] = 1.0 - l[1] - l[2];
    return std::make_pair(cell, l);
  };
  return {[&sys, u, locate](const Point& x) -> Eigen::Vector2d {
            const auto [cell, l] = locate(x);
            return sys.local_coefficients(cell, u) * sys.basis(cell, l).values;
          },
          [&sys, u, locate](const Point& x) -> Tensor2 {
            const auto [cell, l] = locate(x);
            return sys.local_coefficients(cell, u) * sys.basis(cell, l).gradients;
          }};
}

Field random_field(const FeSystem& sys, std::mt19937_64& rng, bool with_bubbles)
{
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Vector free(sys.num_free_velocity_dofs());
  for (int i = 0; i < free.size(); ++i) {
    const bool bubble = sys.full_index(i) >= 2 * sys.mesh().num_vertices();
    free[i] = bubble && !with_bubbles ? 0.0 : unit(rng);
  }
  return sys.extend_from_free(free);
}

double integrate_cell(const FeSystem& sys, int c, const std::function<double(const Point&)>& f)
{
  const QuadratureRule& rule = analytic_rule();
  double sum = 0.0;
  for (std::size_t q = 0; q < rule.size(); ++q)
    sum += rule.weights[q] * f(sys.to_physical(c, rule.points[q]));
  return sum * sys.mesh().area(c);
}

// (div w, eta_i) for all P1 pressures, by analytic_rule().
Vector analytic_divergence_moments(const FeSystem& sys, const VectorFunction& w)
{
  const QuadratureRule& rule = analytic_rule();
  Vector out = Vector::Zero(sys.num_pressure_dofs());
  for (int c = 0; c < sys.mesh().num_cells(); ++c) {
    const Cell& t = sys.mesh().cell(c);
    const double area = sys.mesh().area(c);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double div = w.gradient(sys.to_physical(c, rule.points[q])).trace();
      for (int k = 0; k < 3; ++k)
        out[t[k]] += area * rule.weights[q] * div * rule.points[q][k];
    }
  }
  return out;
}

// Largest local W^{1,1} stability ratio of interp_div over all cells.
double w11_ratio(const FeSystem& sys, const VectorFunction& w)
{
  const Mesh& mesh = sys.mesh();
  const Field pi = interp_div(sys, w);
  const int n = mesh.num_cells();
  std::vector<double> w_int(n);
  std::vector<double> grad_int(n);
  for (int c = 0; c < n; ++c) {
    w_int[c] = integrate_cell(sys, c, [&](const Point& x) { return w.value(x).norm(); });
    grad_int[c] = integrate_cell(sys, c, [&](const Point& x) { return w.gradient(x).norm(); });
  }
  const QuadratureRule& rule = analytic_rule();
  double worst = 0.0;
  for (int c = 0; c < n; ++c) {
    const auto local = sys.local_coefficients(c, pi);
    double lhs = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q)
      lhs += rule.weights[q] * (local * sys.basis(c, rule.points[q]).values).norm();
    double patch_area = 0.0;
    double w_sum = 0.0;
    double g_sum = 0.0;
    for (int c2 : mesh.patch(c)) {
      patch_area += mesh.area(c2);
      w_sum += w_int[c2];
      g_sum += grad_int[c2];
    }
    const double rhs = (w_sum + mesh.diameter(c) * g_sum) / patch_area;
    if (rhs > 0.0)
      worst = std::max(worst, lhs / rhs);
  }
  return worst;
}

}  // namespace

const Band& BandTable::at(const std::string& name) const
{
  const auto it = bands_.find(name);
  if (it == bands_.end())
    throw std::out_of_range("BandTable: no band named '" + name + "'");
  return it->second;
}

BandTable BandTable::read(std::istream& is)
{
  BandTable table;
  std::string line;
  int number = 0;
  while (std::getline(is, line)) {
    ++number;
    if (line.empty() || line[0] == '#')
      continue;
    std::istringstream ls(line);
    std::string name;
    Band b;
    std::string rest;
    if (!(ls >> name >> b.lower >> b.upper) || (ls >> rest) || !(b.lower <= b.upper))
      throw std::runtime_error("BandTable: malformed line " + std::to_string(number) + ": " + line);
    table.set(name, b);
  }
  return table;
}

BandTable BandTable::read_file(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("BandTable: cannot open " + path);
  return read(in);
}

void BandTable::write(std::ostream& os) const
{
  os.precision(17);
  for (const auto& [name, b] : bands_)
    os << name << ' ' << b.lower << ' ' << b.upper << '\n';
}

std::string band_file_name(double p) { return "nfunc_bands_p" + format_number(p) + ".txt"; }

BandTable measure_nfunc_quantities(double p, std::uint64_t seed, int samples)
{
  std::map<std::string, Range> all;
  for (std::size_t d = 0; d < kSuiteDeltas.size(); ++d) {
    std::mt19937_64 rng(seed + d);
    for (const auto& [name, r] : sample_quantities(PStructure(p, kSuiteDeltas[d]), rng, samples)) {
      all[name].add(r.lo);
      all[name].add(r.hi);
    }
  }
  BandTable table;
  for (const auto& [name, r] : all)
    table.set(name, {r.lo, r.hi});
  return table;
}

BandTable calibrate_nfunc_bands(double p, std::uint64_t seed, int samples, double margin)
{
  BandTable measured = measure_nfunc_quantities(p, seed, samples);
  BandTable out;
  for (const auto& [name, b] : measured.bands()) {
    if (name.rfind("young_eps_", 0) == 0)
      out.set(name, {0.0, b.upper * margin});
    else
      out.set(name, {b.lower / margin, b.upper * margin});
  }
  return out;
}

BandTable measure_fem_quantities(std::uint64_t seed, int fields)
{
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int n : {4, 8}) {
    const FeSystem sys(Mesh::structured(n));
    for (int k = 0; k < fields; ++k)
      worst = std::max(worst, w11_ratio(sys, random_smooth_field(rng)));
  }
  BandTable table;
  table.set("w11_stability", {0.0, worst});
  return table;
}

BandTable calibrate_fem_bands(std::uint64_t seed, int fields, double margin)
{
  BandTable t = measure_fem_quantities(seed, fields);
  t.set("w11_stability", {0.0, t.at("w11_stability").upper * margin});
  return t;
}

bool PropertyReport::passed() const { return failures() == 0; }

int PropertyReport::failures() const
{
  return static_cast<int>(std::count_if(checks.begin(), checks.end(), [](const Check& c) { return !c.pass; }));
}

void PropertyReport::append(const PropertyReport& other)
{
  checks.insert(checks.end(), other.checks.begin(), other.checks.end());
}

void PropertyReport::write(std::ostream& os) const
{
  os.precision(6);
  for (const Check& c : checks) {
    os << (c.pass ? "PASS " : "FAIL ") << c.name << ' ' << c.value << ' ' << c.limit;
    if (!c.detail.empty())
      os << ' ' << c.detail;
    os << '\n';
  }
  os << checks.size() - failures() << '/' << checks.size() << " checks passed\n";
}

Tensor2 random_tensor(std::mt19937_64& rng)
{
  std::uniform_real_distribution<double> unit(-2.0, 2.0);
  Tensor2 t;
  t << unit(rng), unit(rng), unit(rng), unit(rng);
  return t;
}

PropertyReport nfunc_properties(const PStructure& ps, const BandTable& bands, std::uint64_t seed, int samples)
{
  const std::string at = tag(ps);
  const double p = ps.p();
  const double delta = ps.delta();
  std::mt19937_64 rng(seed);
  PropertyReport report;

  std::vector<double> ts(samples);
  for (double& t : ts)
    t = log_uniform(rng, -4.0, 2.0);

  report.add(bound_check("phi_zero" + at, std::abs(nfunc::phi(ps, 0.0)), 0.0));

  double convexity = -kInf;
  for (int k = 0; k + 1 < samples; k += 2) {
    const double s = ts[k], t = ts[k + 1];
    const double mid = nfunc::phi(ps, 0.5 * (s + t));
    const double avg = 0.5 * (nfunc::phi(ps, s) + nfunc::phi(ps, t));
    convexity = std::max(convexity, (mid - avg) / avg);
  }
  report.add(bound_check("convexity_midpoint" + at, convexity, 1e-12, "relative excess of phi at midpoints"));

  std::vector<double> sorted = ts;
  std::sort(sorted.begin(), sorted.end());
  double drop = 0.0;
  for (std::size_t k = 1; k < sorted.size(); ++k)
    drop = std::max(drop, nfunc::phi_prime(ps, sorted[k - 1]) - nfunc::phi_prime(ps, sorted[k]));
  report.add(bound_check("phi_prime_nondecreasing" + at, drop, 0.0));

  const double delta2_limit = std::pow(2.0, std::max(2.0, p) + 1.0);
  double delta2 = 0.0;
  Range tangent;
  Range second;
  for (double t : ts) {
    delta2 = std::max(delta2, nfunc::phi(ps, 2 * t) / nfunc::phi(ps, t));
    tangent.add(nfunc::phi_prime(ps, t) * t / nfunc::phi(ps, t));
    const double scale = std::pow(delta + t, p - 2.0);
    second.add(nfunc::phi_second(ps, t) / scale);
  }
  report.add(bound_check("delta2" + at, delta2, delta2_limit));
  report.add(band_check("phi_prime_t_over_phi" + at, tangent, {1.0 - 1e-10, std::max(2.0, p) * (1.0 + 1e-10)}));
  report.add(band_check("phi_second_bounds" + at, second,
                        {std::min(1.0, p - 1.0) * (1.0 - 1e-12), std::max(1.0, p - 1.0) * (1.0 + 1e-12)}));

  Range conjugate;
  for (double t : ts)
    conjugate.add(nfunc::phi_conjugate(ps, nfunc::phi_prime(ps, t)) / nfunc::phi(ps, t));
  report.add(band_check("conjugate_composition" + at, conjugate, bands.at("conjugate_over_phi")));

  // Young: s t <= eps phi_a(s) + c_eps (phi_a)*(t)
  std::vector<double> young_excess(kYoungEpsilons.size(), -kInf);
  for (int k = 0; k < samples; ++k) {
    const double s = log_uniform(rng, -3.0, 1.0);
    const double t = log_uniform(rng, -3.0, 1.0);
    const double a = log_uniform(rng, -3.0, 1.0);
    const double phi_a = nfunc::phi_shift(ps, a, s);
    const double conj = nfunc::phi_shift_conjugate(ps, a, t);
    for (std::size_t e = 0; e < kYoungEpsilons.size(); ++e) {
      const double c_eps = bands.at(young_name(kYoungEpsilons[e])).upper;
      const double rhs = kYoungEpsilons[e] * phi_a + c_eps * conj;
      young_excess[e] = std::max(young_excess[e], (s * t - rhs) / rhs);
    }
  }
  for (std::size_t e = 0; e < kYoungEpsilons.size(); ++e)
    report.add(bound_check(young_name(kYoungEpsilons[e]) + at, young_excess[e], 1e-12,
                           "relative excess of s t over the Young bound"));

  double mono_worst = -kInf;
  double strict_worst = kInf;
  std::map<std::string, Range> ratios;
  for (const auto& [pp, qq] : tensor_pairs(rng, samples)) {
    const Tensor2 diff = symmetric_part(pp) - symmetric_part(qq);
    const double gap = frobenius(nfunc::stress(ps, pp) - nfunc::stress(ps, qq), pp - qq);
    const double floor = -1e-14 * std::pow(1.0 + pp.norm() + qq.norm(), p);
    mono_worst = std::max(mono_worst, floor - gap);
    if (diff.norm() >= 1e-6)
      strict_worst = std::min(strict_worst, gap);
    if (diff.norm() == 0.0)
      continue;
    const auto r = nfunc::equivalence_ratios(ps, pp, qq);
    ratios["pot15a_mono_over_f"].add(r.monotonicity / r.f_distance);
    ratios["pot15a_shifted_over_f"].add(r.shifted / r.f_distance);
    ratios["pot15a_second_over_f"].add(r.second_order / r.f_distance);
    const double m = symmetric_part(pp).norm();
    if (m > 0.0) {
      const double f2 = nfunc::fmap(ps, pp).squaredNorm();
      ratios["pot15b_sp_over_f"].add(frobenius(nfunc::stress(ps, pp), pp) / f2);
      ratios["pot15b_f_over_phi"].add(f2 / nfunc::phi(ps, m));
    }
  }
  report.add(bound_check("monotonicity" + at, mono_worst, 0.0, "worst shortfall below -1e-14 (1+|P|+|Q|)^p"));
  report.add({"monotonicity_strict" + at, strict_worst > 0.0, strict_worst, 0.0,
              "smallest gap with |P^sym - Q^sym| >= 1e-6"});
  for (const auto& [name, r] : ratios)
    report.add(band_check(name + at, r, bands.at(name)));

  // derivative of S: symmetry and finite-difference consistency
  double asym = 0.0;
  double order = kInf;
  for (int k = 0; k < 200; ++k) {
    const Tensor2 pp = random_tensor(rng);
    const Tensor2 q1 = random_tensor(rng);
    const Tensor2 q2 = random_tensor(rng);
    const double a = frobenius(nfunc::stress_derivative(ps, pp, q1), q2);
    const double b = frobenius(nfunc::stress_derivative(ps, pp, q2), q1);
    asym = std::max(asym, std::abs(a - b) / (1.0 + std::abs(a)));
    const Tensor2 ds = nfunc::stress_derivative(ps, pp, q1);
    auto fd_error = [&](double eps) {
      return ((nfunc::stress(ps, pp + eps * q1) - nfunc::stress(ps, pp)) / eps - ds).norm();
    };
    const double e3 = fd_error(1e-3);
    const double e5 = fd_error(1e-5);
    if (e3 > 1e-12)
      order = std::min(order, std::log10(e3 / e5) / 2.0);
  }
  report.add(bound_check("stress_derivative_symmetry" + at, asym, 1e-12));
  report.add({"stress_derivative_fd_order" + at, order >= 0.9, order, 0.9,
              "observed decay order of forward differences, eps 1e-3 to 1e-5"});
  return report;
}

PropertyReport field_properties(const PStructure& ps, std::uint64_t seed, int pairs, int n)
{
  const std::string name = ps.p() < 2.0 ? "au7" : "au8";
  const FeSystem sys(Mesh::structured(n));
  std::mt19937_64 rng(seed);
  double general = 0.0;
  double against_zero = 0.0;
  for (int k = 0; k < pairs; ++k) {
    const Field u = random_field(sys, rng, true);
    const Field v = random_field(sys, rng, true);
    general = std::max(general, compare_fields(sys, ps, u, v).ratio);
    against_zero = std::max(against_zero, compare_fields(sys, ps, u, sys.zero_velocity()).ratio);
  }
  PropertyReport report;
  const std::string what = ps.p() < 2.0 ? "max ||F(Du)-F(Dv)||_2^(4/p) / ||Du-Dv||_p^2"
                                        : "max ||Du-Dv||_p^p / ||F(Du)-F(Dv)||_2^2";
  report.add(bound_check(name + "_random_pairs" + tag(ps), general, 1.0 + 1e-8, what));
  report.add(bound_check(name + "_against_zero" + tag(ps), against_zero, 1.0 + 1e-8, what + ", v = 0"));
  return report;
}

VectorFunction random_smooth_field(std::mt19937_64& rng)
{
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  // Frequencies stay low enough for analytic_rule() to resolve w on n = 4 cells.
  std::uniform_real_distribution<double> freq(0.5, 1.5);
  struct Component {
    double a0, a1, kx, ky, phase;
  };
  std::array<Component, 2> comp;
  for (auto& c : comp)
    c = {unit(rng), unit(rng), freq(rng), freq(rng),
         std::numbers::pi * unit(rng)};
  // w_c = b(x, y) (a0 + a1 sin(pi (kx x + ky y) + phase)), b = 16 x (1-x) y (1-y)
  auto value = [comp](const Point& x) -> Eigen::Vector2d {
    const double b = 16.0 * x.x() * (1 - x.x()) * x.y() * (1 - x.y());
    Eigen::Vector2d out;
    for (int i = 0; i < 2; ++i) {
      const auto& c = comp[i];
      out[i] = b * (c.a0 + c.a1 * std::sin(std::numbers::pi * (c.kx * x.x() + c.ky * x.y()) + c.phase));
    }
    return out;
  };
  auto gradient = [comp](const Point& x) -> Tensor2 {
    const double bx = 16.0 * (1 - 2 * x.x()) * x.y() * (1 - x.y());
    const double by = 16.0 * x.x() * (1 - x.x()) * (1 - 2 * x.y());
    const double b = 16.0 * x.x() * (1 - x.x()) * x.y() * (1 - x.y());
    Tensor2 g;
    for (int i = 0; i < 2; ++i) {
      const auto& c = comp[i];
      const double arg = std::numbers::pi * (c.kx * x.x() + c.ky * x.y()) + c.phase;
      const double s = c.a0 + c.a1 * std::sin(arg);
      const double ds = c.a1 * std::cos(arg) * std::numbers::pi;
      g(i, 0) = bx * s + b * ds * c.kx;
      g(i, 1) = by * s + b * ds * c.ky;
    }
    return g;
  };
  return {value, gradient};
}

PropertyReport fem_properties(const BandTable& bands, std::uint64_t seed, int fields)
{
  PropertyReport report;
  std::mt19937_64 rng(seed);

  {
    const FeSystem sys(Mesh::structured(4));
    double unity = 0.0;
    double trace = 0.0;
    const LineRule gauss = gauss_legendre(5);
    for (int c = 0; c < sys.mesh().num_cells(); ++c) {
      for (const auto& l : assembly_rule().points)
        unity = std::max(unity, std::abs(sys.basis(c, l).values.head<3>().sum() - 1.0));
      for (int e = 0; e < 3; ++e) {
        std::vector<double> params = gauss.points;
        params.push_back(0.5);
        for (double s : params) {
          Eigen::Vector3d l = Eigen::Vector3d::Zero();
          l[e] = s;
          l[(e + 1) % 3] = 1.0 - s;
          trace = std::max(trace, std::abs(sys.basis(c, l).values[3]));
        }
      }
    }
    report.add(bound_check("partition_of_unity", unity, 1e-14));
    report.add(bound_check("bubble_trace", trace, 1e-14));
  }

  double defect = 0.0;
  double reproduction = 0.0;
  double w11 = 0.0;
  for (int n : {4, 8}) {
    const FeSystem sys(Mesh::structured(n));
    for (int k = 0; k < fields; ++k) {
      const VectorFunction w = random_smooth_field(rng);
      const Field pi = interp_div(sys, w);
      const Vector discrete = sys.divergence() * sys.restrict_to_free(pi);
      const Vector exact = analytic_divergence_moments(sys, w);
      double grad_l1 = 0.0;
      for (int c = 0; c < sys.mesh().num_cells(); ++c)
        grad_l1 += integrate_cell(sys, c, [&](const Point& x) { return w.gradient(x).norm(); });
      defect = std::max(defect, (discrete - exact).lpNorm<Eigen::Infinity>() / grad_l1);
      w11 = std::max(w11, w11_ratio(sys, w));

      const Field p1 = random_field(sys, rng, false);
      const Field back = interp_div(sys, field_function(sys, n, p1));
      reproduction = std::max(reproduction, (back.coeffs - p1.coeffs).lpNorm<Eigen::Infinity>());
    }
  }
  report.add(bound_check("divergence_preservation", defect, 1e-8,
                         "max_i |(div(w - Pi w), eta_i)| / ||grad w||_L1"));
  report.add(bound_check("p1_reproduction", reproduction, 1e-13, "max coefficient difference"));
  report.add(bound_check("w11_stability", w11, bands.at("w11_stability").upper));

  {
    const FeSystem sys(Mesh::structured(8));
    const Field c = interp_pressure(sys, [](const Point&) { return 2.5; });
    report.add(bound_check("pressure_constant_reproduction",
                           (c.coeffs.array() - 2.5).abs().maxCoeff(), 1e-13));
    const ScalarFunction q = [](const Point& x) { return std::sin(3 * x.x()) * std::exp(x.y()) - 0.7; };
    const Field pq = interp_pressure(sys, q);
    const Mesh& mesh = sys.mesh();
    double worst = 0.0;
    for (int cell = 0; cell < mesh.num_cells(); ++cell) {
      const double lhs = integrate_cell(sys, cell, [&](const Point& x) {
        const Eigen::Vector3d l = sys.barycentric_gradients(cell) * (x - mesh.vertex(mesh.cell(cell)[0]));
        Eigen::Vector3d bary(1.0 - l[1] - l[2], l[1], l[2]);
        return std::abs(evaluate_pressure(sys, pq, cell, bary));
      }) / mesh.area(cell);
      double area = 0.0;
      double rhs = 0.0;
      for (int c2 : mesh.patch(cell)) {
        area += mesh.area(c2);
        rhs += integrate_cell(sys, c2, [&](const Point& x) { return std::abs(q(x)); });
      }
      worst = std::max(worst, lhs / (rhs / area));
    }
    report.add(bound_check("pressure_local_l1_stability", worst, 13.0));
  }
  return report;
}

PropertyReport run_property_suite(const std::string& fixture_dir, std::uint64_t seed, int samples)
{
  PropertyReport report;
  for (double p : {1.5, 2.0, 3.0}) {
    const BandTable bands = BandTable::read_file(fixture_dir + "/" + band_file_name(p));
    for (std::size_t d = 0; d < kSuiteDeltas.size(); ++d) {
      const PStructure ps(p, kSuiteDeltas[d]);
      report.append(nfunc_properties(ps, bands, seed + 10 * d, samples));
      report.append(field_properties(ps, seed + 10 * d + 1, 50));
    }
  }
  report.append(fem_properties(BandTable::read_file(fixture_dir + "/fem_bands.txt"), seed, 20));
  return report;
}

}  // namespace pstokes

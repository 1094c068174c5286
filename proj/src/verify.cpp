#include "pstokes/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace pstokes {

namespace {

const std::array<double, 3> kGaussNodes = {0.5 - 0.5 * std::sqrt(0.6), 0.5, 0.5 + 0.5 * std::sqrt(0.6)};
constexpr std::array<double, 3> kGaussWeights = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
constexpr int kSamplesPerInterval = 5;

// Calls fn(cell, x, weight * |T|, basis) for every point of analytic_rule().
template <class Fn>
void for_each_point(const FeSystem& sys, Fn&& fn)
{
  const QuadratureRule& rule = analytic_rule();
  for (int c = 0; c < sys.mesh().num_cells(); ++c) {
    const double area = sys.mesh().area(c);
    for (std::size_t q = 0; q < rule.size(); ++q)
      fn(c, sys.to_physical(c, rule.points[q]), rule.weights[q] * area, sys.basis(c, rule.points[q]));
  }
}

bool halves(double coarse, double fine) { return std::abs(coarse / fine - 2.0) <= 1e-12; }

void write_value(std::ostream& os, double v, bool csv)
{
  if (std::isnan(v)) {
    if (!csv)
      os << "NaN";
  } else {
    os << v;
  }
}

}  // namespace

ErrorRow error_report(const Trajectory& traj, const ManufacturedSolution& exact, const FeSystem& sys,
                      const PStructure& ps)
{
  const TimeGrid& grid = traj.grid;
  if (static_cast<int>(traj.states.size()) != grid.steps() + 1)
    throw std::invalid_argument("error_report: trajectory is incomplete");
  const double dt = grid.dt();

  ErrorRow row;
  row.h = shape_metrics(sys.mesh()).h;
  row.dt = dt;

  double max_sq = std::pow(l2_error(sys, traj.states[0], [&](const Point& x) { return exact.u(0.0, x); }), 2);
  double f_sum = 0.0;
  for (int n = 1; n <= grid.steps(); ++n) {
    const Field& state = traj.states[n];
    const double t0 = grid.time(n - 1);
    std::array<double, kSamplesPerInterval> u_sq{};
    double f_sq = 0.0;
    Eigen::Matrix<double, 2, 4> local;
    int current = -1;
    Tensor2 f_h;
    for_each_point(sys, [&](int c, const Point& x, double w, const LocalBasis& basis) {
      if (c != current) {
        local = sys.local_coefficients(c, state);
        current = c;
      }
      const Eigen::Vector2d value = local * basis.values;
      const Tensor2 grad = local * basis.gradients;
      f_h = nfunc::fmap(ps, grad);
      for (int k = 0; k < kSamplesPerInterval; ++k) {
        const double t = t0 + (k + 1) * dt / kSamplesPerInterval;
        u_sq[k] += w * (exact.u(t, x) - value).squaredNorm();
      }
      for (int k = 0; k < 3; ++k) {
        const double t = t0 + kGaussNodes[k] * dt;
        f_sq += kGaussWeights[k] * w * (nfunc::fmap(ps, exact.grad_u(t, x)) - f_h).squaredNorm();
      }
    });
    max_sq = std::max(max_sq, *std::max_element(u_sq.begin(), u_sq.end()));
    f_sum += dt * f_sq;
  }
  row.err_u = std::sqrt(max_sq);
  row.err_F = std::sqrt(f_sum);
  return row;
}

std::vector<double> eoc(const std::vector<double>& errors, const std::vector<double>& hs)
{
  if (errors.size() != hs.size())
    throw std::invalid_argument("eoc: errors and hs differ in length");
  if (errors.size() < 2)
    throw std::invalid_argument("eoc: need at least two entries");
  for (std::size_t k = 0; k < errors.size(); ++k) {
    if (!(errors[k] > 0.0))
      throw std::invalid_argument("eoc: errors must be positive");
    if (k > 0 && !(hs[k] < hs[k - 1]))
      throw std::invalid_argument("eoc: hs must be strictly decreasing");
  }
  if (!(hs.back() > 0.0))
    throw std::invalid_argument("eoc: hs must be positive");
  std::vector<double> out;
  for (std::size_t k = 0; k + 1 < errors.size(); ++k)
    out.push_back(std::log(errors[k] / errors[k + 1]) / std::log(hs[k] / hs[k + 1]));
  return out;
}

void fill_eoc(ErrorTable& table)
{
  auto& rows = table.rows;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    rows[k].eoc_u = rows[k].eoc_F = kNoValue;
    if (k == 0 || !halves(rows[k - 1].h, rows[k].h))
      continue;
    rows[k].eoc_u = eoc({rows[k - 1].err_u, rows[k].err_u}, {rows[k - 1].h, rows[k].h})[0];
    rows[k].eoc_F = eoc({rows[k - 1].err_F, rows[k].err_F}, {rows[k - 1].h, rows[k].h})[0];
  }
}

void write_csv(std::ostream& os, const ErrorTable& table)
{
  os << "h,dt,err_u,err_F,eoc_u,eoc_F,runtime_s\n";
  os.precision(10);
  for (const ErrorRow& r : table.rows) {
    const double values[] = {r.h, r.dt, r.err_u, r.err_F, r.eoc_u, r.eoc_F, r.runtime_s};
    for (int k = 0; k < 7; ++k) {
      if (k)
        os << ',';
      write_value(os, values[k], true);
    }
    os << '\n';
  }
}

void write_dat(std::ostream& os, const ErrorTable& table)
{
  os << "# h dt err_u err_F eoc_u eoc_F runtime_s\n";
  os.precision(10);
  for (const ErrorRow& r : table.rows) {
    const double values[] = {r.h, r.dt, r.err_u, r.err_F, r.eoc_u, r.eoc_F, r.runtime_s};
    for (int k = 0; k < 7; ++k) {
      if (k)
        os << ' ';
      write_value(os, values[k], false);
    }
    os << '\n';
  }
}

double l2_error(const FeSystem& sys, const Field& u_h, const std::function<Eigen::Vector2d(const Point&)>& u)
{
  double sum = 0.0;
  for_each_point(sys, [&](int c, const Point& x, double w, const LocalBasis& basis) {
    sum += w * (u(x) - sys.local_coefficients(c, u_h) * basis.values).squaredNorm();
  });
  return std::sqrt(sum);
}

double f_error(const FeSystem& sys, const PStructure& ps, const Field& u_h,
               const std::function<Tensor2(const Point&)>& grad_u)
{
  double sum = 0.0;
  for_each_point(sys, [&](int c, const Point& x, double w, const LocalBasis& basis) {
    const Tensor2 grad = sys.local_coefficients(c, u_h) * basis.gradients;
    sum += w * (nfunc::fmap(ps, grad_u(x)) - nfunc::fmap(ps, grad)).squaredNorm();
  });
  return std::sqrt(sum);
}

double temporal_error(const FeSystem& sys, const Trajectory& coarse, const Trajectory& reference)
{
  const int m = coarse.grid.steps();
  const int m_ref = reference.grid.steps();
  if (m_ref % m != 0 || std::abs(coarse.grid.t_end() - reference.grid.t_end()) > 1e-14)
    throw std::invalid_argument("temporal_error: reference grid does not refine the coarse grid");
  if (static_cast<int>(coarse.states.size()) != m + 1 || static_cast<int>(reference.states.size()) != m_ref + 1)
    throw std::invalid_argument("temporal_error: incomplete trajectory");
  const int ratio = m_ref / m;
  double worst = 0.0;
  for (int n = 0; n <= m; ++n) {
    Field diff = coarse.states[n];
    diff.coeffs -= reference.states[n * ratio].coeffs;
    worst = std::max(worst, l2_norm(sys, diff));
  }
  return worst;
}

FieldComparison compare_fields(const FeSystem& sys, const PStructure& ps, const Field& u, const Field& v)
{
  const QuadratureRule& rule = assembly_rule();
  const double p = ps.p();
  double f_sq = 0.0;
  double p_sum = 0.0;
  for (int c = 0; c < sys.mesh().num_cells(); ++c) {
    const auto lu = sys.local_coefficients(c, u);
    const auto lv = sys.local_coefficients(c, v);
    const double area = sys.mesh().area(c);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto& g = sys.basis(c, rule.points[q]).gradients;
      const Tensor2 du = lu * g;
      const Tensor2 dv = lv * g;
      f_sq += area * rule.weights[q] * (nfunc::fmap(ps, du) - nfunc::fmap(ps, dv)).squaredNorm();
      p_sum += area * rule.weights[q] * std::pow(hs_norm(symmetric_part(du - dv)), p);
    }
  }
  FieldComparison out;
  out.f_distance_sq = f_sq;
  out.p_distance = std::pow(p_sum, 1.0 / p);
  if (p < 2.0)
    out.ratio = std::pow(f_sq, 2.0 / p) / (out.p_distance * out.p_distance);
  else
    out.ratio = p_sum / f_sq;
  return out;
}

}  // namespace pstokes

#ifndef PSTOKES_VERIFY_HPP
#define PSTOKES_VERIFY_HPP

#include "pstokes/manufactured.hpp"
#include "pstokes/time_stepping.hpp"

#include <iosfwd>
#include <limits>
#include <vector>

namespace pstokes {

inline constexpr double kNoValue = std::numeric_limits<double>::quiet_NaN();

/// One row of a convergence table. EOC entries are NaN on the first row and
/// wherever the previous row is not an exact h-halving.
struct ErrorRow {
  double h = 0.0;
  double dt = 0.0;
  double err_u = 0.0;  ///< max_t || u(t) - U(t) ||_{L2}
  double err_F = 0.0;  ///< || F(D u) - F(D U) ||_{L2(L2)}
  double eoc_u = kNoValue;
  double eoc_F = kNoValue;
  double runtime_s = 0.0;
};

struct ErrorTable {
  std::vector<ErrorRow> rows;
};

/// Errors of a trajectory against an exact solution, U piecewise constant in
/// time with U = U^n on (t_{n-1}, t_n] and U(0) = U^0. The L-infinity part
/// samples 5 equispaced times per interval (right endpoints included), the
/// L2-in-time part uses Gauss-3 per interval. Space integrals use
/// analytic_rule(). runtime_s is left at 0.
ErrorRow error_report(const Trajectory& traj, const ManufacturedSolution& exact, const FeSystem& sys,
                      const PStructure& ps);

/// log(e_k / e_{k+1}) / log(h_k / h_{k+1}). Throws std::invalid_argument on
/// length mismatch, fewer than two entries, non-positive errors or h not
/// strictly decreasing.
std::vector<double> eoc(const std::vector<double>& errors, const std::vector<double>& hs);

/// Fills eoc_u / eoc_F of consecutive rows whose h halves exactly.
void fill_eoc(ErrorTable& table);

/// CSV with header `h,dt,err_u,err_F,eoc_u,eoc_F,runtime_s`; missing EOCs
/// are written as empty fields.
void write_csv(std::ostream& os, const ErrorTable& table);
/// Whitespace-separated columns with a `#` header line; missing values as NaN.
void write_dat(std::ostream& os, const ErrorTable& table);

/// || u - u_h ||_{L2} for analytic u, by analytic_rule().
double l2_error(const FeSystem& sys, const Field& u_h, const std::function<Eigen::Vector2d(const Point&)>& u);

/// || F(D u) - F(D u_h) ||_{L2} for an analytic gradient, by analytic_rule().
double f_error(const FeSystem& sys, const PStructure& ps, const Field& u_h,
               const std::function<Tensor2(const Point&)>& grad_u);

/// max over the common nodes of || U^n - U_ref^m ||_{L2}, where the
/// reference grid refines the coarse one by an integer factor.
double temporal_error(const FeSystem& sys, const Trajectory& coarse, const Trajectory& reference);

/// Field-level comparison of || F(Du) - F(Dv) ||_2 with || Du - Dv ||_p.
struct FieldComparison {
  double f_distance_sq = 0.0;  ///< || F(Du) - F(Dv) ||_2^2
  double p_distance = 0.0;     ///< || Du - Dv ||_p
  /// p < 2: || F(Du) - F(Dv) ||_2^{4/p} / || Du - Dv ||_p^2;
  /// p >= 2: || Du - Dv ||_p^p / || F(Du) - F(Dv) ||_2^2.
  /// The constant-free estimates claim ratio <= 1.
  double ratio = 0.0;
};
FieldComparison compare_fields(const FeSystem& sys, const PStructure& ps, const Field& u, const Field& v);

}  // namespace pstokes

#endif

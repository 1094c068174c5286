#ifndef PSTOKES_TIME_STEPPING_HPP
#define PSTOKES_TIME_STEPPING_HPP

#include "pstokes/fe_system.hpp"
#include "pstokes/newton.hpp"

#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

namespace pstokes {

/// Space-time vector field f(t, x).
using SpaceTimeFunction = std::function<Eigen::Vector2d(double, const Point&)>;

/// Ceiling on the time step of a run.
inline constexpr double kMaxTimeStep = 0.5;

/// Default floor on the shift inside Jacobian evaluations.
inline constexpr double kJacobianFloor = 1e-7;

/// Equidistant grid t_n = n * dt on [0, t_end].
class TimeGrid {
public:
  TimeGrid(double t_end, int steps);

  /// Smallest number of equal steps not longer than `max_dt`.
  static TimeGrid with_max_step(double t_end, double max_dt);

  double t_end() const { return t_end_; }
  int steps() const { return steps_; }
  double dt() const { return t_end_ / steps_; }
  double time(int n) const { return n * dt(); }

private:
  double t_end_;
  int steps_;
};

struct SolverOptions {
  double tol = 1e-10;
  double jac_floor = kJacobianFloor;
  int max_newton = 50;
  bool check_energy_bound = true;
};

/// Per-step record kept alongside the trajectory.
struct StepMonitor {
  int n = 0;
  double t = 0.0;
  double l2_norm = 0.0;    ///< ||U^n||_{L2}
  double f_energy = 0.0;   ///< ||F(D U^n)||_{L2}^2
  int newton_iterations = 0;
  double residual = 0.0;   ///< audited algebraic residual of the step equations
  double bound_lhs = 0.0;  ///< max_k ||U^k||^2 + 2 dt sum_k ||F(D U^k)||^2
  double bound_rhs = 0.0;  ///< exp(T / (1 - dt)) (dt sum_k ||f^k||^2 + ||U^0||^2) + slack
};

struct Trajectory {
  TimeGrid grid{kMaxTimeStep, 1};
  std::vector<Field> states;     ///< U^0 .. U^M
  std::vector<Field> pressures;  ///< q^1 .. q^M
  std::vector<StepMonitor> monitors;
};

/// `n, t_n, l2_norm, f_energy, newton_iters, residual`, one row per step.
void write_checkpoint(std::ostream& os, const Trajectory& traj);

/// A step of `run` failed; carries the trajectory up to the last good step.
class StepFailure : public std::runtime_error {
public:
  StepFailure(const std::string& what, int step, Trajectory partial)
      : std::runtime_error(what), step(step), partial(std::move(partial))
  {
  }
  int step;
  Trajectory partial;
};

/// Time-averaged load: vector (mean_n f, xi_i) and ||mean_n f||_{L2}^2.
struct Load {
  Vector vector;
  double l2_norm_sq = 0.0;
};

/// Load of the mean value of f over (t_a, t_b), Gauss-3 in time.
Load average_rhs(const FeSystem& sys, const SpaceTimeFunction& f, double t_a, double t_b);

struct SolveResult {
  Field velocity;
  Field pressure;
  int iterations = 0;
  double residual = 0.0;
  std::vector<double> energies;
};

/// Initial value u_0^h in V_h with (S(D u_0^h), D xi) = (S(D u_0), D xi)
/// for all discretely divergence-free xi. `pressure` is the multiplier q
/// with R(u_0^h) - B^T q = (S(D u_0), D xi).
SolveResult project_initial(const FeSystem& sys, const PStructure& ps, const VectorFunction& u0,
                            const SolverOptions& opts = {}, SaddleSolver* solver = nullptr);

/// One implicit Euler step, solved as min over V_h of
///   |v - U_prev|_M^2 / (2 dt) + int phi(|D v|) - load . v.
/// The returned pressure satisfies M (U - U_prev) / dt + R(U) - B^T q = load.
SolveResult step(const FeSystem& sys, const PStructure& ps, const Field& u_prev, const Vector& load, double dt,
                 const SolverOptions& opts = {}, SaddleSolver* solver = nullptr,
                 const Field* pressure_guess = nullptr);

/// Residual of the assembled step equations at (U, q): the larger of the
/// momentum residual norm and |B U|.
double step_residual(const FeSystem& sys, const PStructure& ps, const Field& u, const Field& q,
                     const Field& u_prev, const Vector& load, double dt);

/// Full scheme: U^0 from project_initial, then implicit Euler with averaged
/// loads. Throws std::invalid_argument if dt > kMaxTimeStep and StepFailure
/// (with the partial trajectory) if a step fails or the energy bound breaks.
Trajectory run(const FeSystem& sys, const PStructure& ps, const TimeGrid& grid, const VectorFunction& u0,
               const SpaceTimeFunction& f, const SolverOptions& opts = {});

}  // namespace pstokes

#endif

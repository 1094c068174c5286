#include "pstokes/time_stepping.hpp"
#include "pstokes/assembly.hpp"
#include "pstokes/interpolation.hpp"

#include <array>
#include <cmath>
#include <ostream>

namespace pstokes {

namespace {

constexpr double kEnergyBoundSlack = 1e-6;

// Gauss-3 nodes and weights on [0, 1].
const std::array<double, 3> kTimeNodes = {0.5 - 0.5 * std::sqrt(0.6), 0.5, 0.5 + 0.5 * std::sqrt(0.6)};
constexpr std::array<double, 3> kTimeWeights = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

SparseMatrix add_scaled_mass(const FeSystem& sys, SparseMatrix jac, double mass_scale)
{
  Eigen::Map<Vector>(jac.valuePtr(), jac.nonZeros()) +=
      mass_scale * Eigen::Map<const Vector>(sys.mass().valuePtr(), sys.mass().nonZeros());
  return jac;
}

SolveResult to_result(const FeSystem& sys, NewtonResult&& r)
{
  SolveResult out;
  out.velocity = sys.extend_from_free(r.velocity);
  out.pressure = {Space::pressure, std::move(r.pressure)};
  out.iterations = r.iterations;
  out.residual = r.residual;
  out.energies = std::move(r.energies);
  return out;
}

NewtonOptions newton_options(const SolverOptions& opts)
{
  NewtonOptions n;
  n.tol = opts.tol;
  n.max_iterations = opts.max_newton;
  return n;
}

}  // namespace

TimeGrid::TimeGrid(double t_end, int steps) : t_end_(t_end), steps_(steps)
{
  if (!(t_end > 0.0))
    throw std::invalid_argument("TimeGrid: t_end must be positive");
  if (steps < 1)
    throw std::invalid_argument("TimeGrid: need at least one step");
  if (!(dt() < 1.0))
    throw std::invalid_argument("TimeGrid: dt must be below 1");
}

TimeGrid TimeGrid::with_max_step(double t_end, double max_dt)
{
  if (!(max_dt > 0.0))
    throw std::invalid_argument("TimeGrid: max_dt must be positive");
  // guard against t_end / max_dt landing a hair above an integer
  const int steps = static_cast<int>(std::ceil(t_end / max_dt * (1.0 - 1e-12)));
  return TimeGrid(t_end, std::max(steps, 1));
}

void write_checkpoint(std::ostream& os, const Trajectory& traj)
{
  os << "n,t_n,l2_norm,f_energy,newton_iters,residual\n";
  os.precision(10);
  for (const StepMonitor& m : traj.monitors)
    os << m.n << ',' << m.t << ',' << m.l2_norm << ',' << m.f_energy << ',' << m.newton_iterations << ','
       << m.residual << '\n';
}

Load average_rhs(const FeSystem& sys, const SpaceTimeFunction& f, double t_a, double t_b)
{
  if (!(t_a < t_b))
    throw std::invalid_argument("average_rhs: empty time interval");
  const QuadratureRule& rule = assembly_rule();
  Load load;
  load.vector = Vector::Zero(sys.num_free_velocity_dofs());
  for (int c = 0; c < sys.mesh().num_cells(); ++c) {
    Eigen::Matrix<double, 2, 4> local = Eigen::Matrix<double, 2, 4>::Zero();
    double norm_sq = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Eigen::Vector3d& l = rule.points[q];
      const Point x = sys.to_physical(c, l);
      Eigen::Vector2d mean = Eigen::Vector2d::Zero();
      for (int k = 0; k < 3; ++k)
        mean += kTimeWeights[k] * f(t_a + kTimeNodes[k] * (t_b - t_a), x);
      local += rule.weights[q] * mean * sys.basis(c, l).values.transpose();
      norm_sq += rule.weights[q] * mean.squaredNorm();
    }
    const double area = sys.mesh().area(c);
    load.l2_norm_sq += area * norm_sq;
    const auto dofs = sys.cell_dofs(c);
    for (int k = 0; k < 4; ++k)
      for (int comp = 0; comp < 2; ++comp) {
        const int row = sys.free_index(dofs[2 * k + comp]);
        if (row >= 0)
          load.vector[row] += area * local(comp, k);
      }
  }
  return load;
}

SolveResult project_initial(const FeSystem& sys, const PStructure& ps, const VectorFunction& u0,
                            const SolverOptions& opts, SaddleSolver* solver)
{
  const Vector target = assemble_stress_load(sys, ps, u0.gradient);
  EnergyOracle oracle;
  oracle.energy = [&](const Vector& v) { return stress_energy(sys, ps, sys.extend_from_free(v)) - target.dot(v); };
  oracle.gradient = [&](const Vector& v) {
    return Vector(assemble_stress_residual(sys, ps, sys.extend_from_free(v)) - target);
  };
  oracle.hessian = [&](const Vector& v) {
    return assemble_stress_jacobian(sys, ps, sys.extend_from_free(v), opts.jac_floor);
  };

  std::optional<SaddleSolver> local_solver;
  if (!solver)
    solver = &local_solver.emplace(sys);
  Vector init = sys.restrict_to_free(interp_div(sys, u0));
  return to_result(sys, newton_solve(oracle, *solver, sys.divergence(), std::move(init),
                                     Vector::Zero(sys.num_pressure_dofs()), target.norm(), newton_options(opts)));
}

SolveResult step(const FeSystem& sys, const PStructure& ps, const Field& u_prev, const Vector& load, double dt,
                 const SolverOptions& opts, SaddleSolver* solver, const Field* pressure_guess)
{
  if (!(dt > 0.0))
    throw std::invalid_argument("step: dt must be positive");
  const Vector prev = sys.restrict_to_free(u_prev);
  const SparseMatrix& mass = sys.mass();
  EnergyOracle oracle;
  oracle.energy = [&](const Vector& v) {
    const Vector diff = v - prev;
    return 0.5 * diff.dot(mass * diff) / dt + stress_energy(sys, ps, sys.extend_from_free(v)) - load.dot(v);
  };
  oracle.gradient = [&](const Vector& v) {
    return Vector(mass * (v - prev) / dt + assemble_stress_residual(sys, ps, sys.extend_from_free(v)) - load);
  };
  oracle.hessian = [&](const Vector& v) {
    return add_scaled_mass(sys, assemble_stress_jacobian(sys, ps, sys.extend_from_free(v), opts.jac_floor),
                           1.0 / dt);
  };

  std::optional<SaddleSolver> local_solver;
  if (!solver)
    solver = &local_solver.emplace(sys);
  Vector q0 = pressure_guess ? pressure_guess->coeffs : Vector::Zero(sys.num_pressure_dofs());
  return to_result(sys, newton_solve(oracle, *solver, sys.divergence(), prev, std::move(q0), load.norm(),
                                     newton_options(opts)));
}

double step_residual(const FeSystem& sys, const PStructure& ps, const Field& u, const Field& q,
                     const Field& u_prev, const Vector& load, double dt)
{
  const Vector v = sys.restrict_to_free(u);
  const Vector momentum = sys.mass() * (v - sys.restrict_to_free(u_prev)) / dt + assemble_stress_residual(sys, ps, u) -
                          sys.divergence().transpose() * q.coeffs - load;
  return std::max(momentum.norm(), (sys.divergence() * v).norm());
}

Trajectory run(const FeSystem& sys, const PStructure& ps, const TimeGrid& grid, const VectorFunction& u0,
               const SpaceTimeFunction& f, const SolverOptions& opts)
{
  const double dt = grid.dt();
  if (dt > kMaxTimeStep)
    throw std::invalid_argument("run: dt = " + std::to_string(dt) + " exceeds the ceiling " +
                                std::to_string(kMaxTimeStep));

  Trajectory traj;
  traj.grid = grid;
  SaddleSolver solver(sys);

  SolveResult initial;
  try {
    initial = project_initial(sys, ps, u0, opts, &solver);
  } catch (const std::exception& e) {
    throw StepFailure(std::string("initial projection failed: ") + e.what(), 0, std::move(traj));
  }
  traj.states.push_back(initial.velocity);

  const double u0_sq = std::pow(l2_norm(sys, initial.velocity), 2);
  const double growth = std::exp(grid.t_end() / (1.0 - dt));
  double max_sq = u0_sq;
  double f_sum = 0.0;
  double load_sum = 0.0;

  StepMonitor m0;
  m0.l2_norm = std::sqrt(u0_sq);
  m0.f_energy = f_energy(sys, ps, initial.velocity);
  m0.newton_iterations = initial.iterations;
  m0.residual = initial.residual;
  m0.bound_lhs = u0_sq;
  m0.bound_rhs = u0_sq + kEnergyBoundSlack;
  traj.monitors.push_back(m0);

  for (int n = 1; n <= grid.steps(); ++n) {
    const Load load = average_rhs(sys, f, grid.time(n - 1), grid.time(n));
    SolveResult r;
    try {
      const Field* guess = traj.pressures.empty() ? nullptr : &traj.pressures.back();
      r = step(sys, ps, traj.states.back(), load.vector, dt, opts, &solver, guess);
    } catch (const std::exception& e) {
      throw StepFailure("step " + std::to_string(n) + " failed: " + e.what(), n, std::move(traj));
    }

    StepMonitor m;
    m.n = n;
    m.t = grid.time(n);
    m.l2_norm = l2_norm(sys, r.velocity);
    m.f_energy = f_energy(sys, ps, r.velocity);
    m.newton_iterations = r.iterations;
    m.residual = step_residual(sys, ps, r.velocity, r.pressure, traj.states.back(), load.vector, dt);

    max_sq = std::max(max_sq, m.l2_norm * m.l2_norm);
    f_sum += m.f_energy;
    load_sum += load.l2_norm_sq;
    m.bound_lhs = max_sq + 2.0 * dt * f_sum;
    m.bound_rhs = growth * (dt * load_sum + u0_sq) + kEnergyBoundSlack;

    traj.states.push_back(std::move(r.velocity));
    traj.pressures.push_back(std::move(r.pressure));
    traj.monitors.push_back(m);

    if (opts.check_energy_bound && m.bound_lhs > m.bound_rhs)
      throw StepFailure("energy bound violated at step " + std::to_string(n), n, std::move(traj));
  }
  return traj;
}

}  // namespace pstokes

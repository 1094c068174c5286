#include "pstokes/studies.hpp"
#include "pstokes/inf_sup.hpp"
#include "pstokes/interpolation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <ostream>

namespace pstokes {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) { return std::chrono::duration<double>(Clock::now() - start).count(); }

// Runs task(i) for i < count on up to `jobs` threads; results by index.
template <class T, class Task>
std::vector<T> run_indexed(int count, int jobs, Task task)
{
  std::vector<T> out(count);
  for (int first = 0; first < count; first += jobs) {
    std::vector<std::future<T>> batch;
    for (int i = first; i < std::min(count, first + jobs); ++i)
      batch.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred, task, i));
    for (int i = first; i < std::min(count, first + jobs); ++i)
      out[i] = batch[i - first].get();
  }
  return out;
}

SolverOptions solver_options(const StudyConfig& config)
{
  SolverOptions opts;
  opts.tol = config.tol;
  return opts;
}

Verdict at_least(const std::string& name, double value, double threshold)
{
  return {name, value >= threshold, value, threshold, ""};
}

bool bound_held(const Trajectory& traj)
{
  return std::all_of(traj.monitors.begin(), traj.monitors.end(),
                     [](const StepMonitor& m) { return m.bound_lhs <= m.bound_rhs; });
}

double last_or_nan(const ErrorTable& t, double ErrorRow::*field)
{
  return t.rows.empty() ? kNoValue : t.rows.back().*field;
}

// EOCs with respect to dt between consecutive rows that halve dt.
void fill_eoc_dt(ErrorTable& table)
{
  auto& rows = table.rows;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    rows[k].eoc_u = rows[k].eoc_F = kNoValue;
    if (k == 0 || std::abs(rows[k - 1].dt / rows[k].dt - 2.0) > 1e-12)
      continue;
    rows[k].eoc_u = eoc({rows[k - 1].err_u, rows[k].err_u}, {rows[k - 1].dt, rows[k].dt})[0];
    rows[k].eoc_F = eoc({rows[k - 1].err_F, rows[k].err_F}, {rows[k - 1].dt, rows[k].dt})[0];
  }
}

}  // namespace

bool StudyResult::passed() const
{
  return energy_bound_held &&
         std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

double spatial_threshold(double p)
{
  if (p == 2.0)
    return 0.9;
  if (p < 2.0)
    return 0.85;
  return 0.825 * (2.0 / p);
}

StudyResult convergence_study(const StudyConfig& config)
{
  config.validate();
  const PStructure ps(config.p, config.delta);
  const ManufacturedSolution exact = manufactured(config.solution, ps);
  const SolverOptions opts = solver_options(config);

  struct LevelResult {
    ErrorRow row;
    bool bound = true;
  };
  const auto results = run_indexed<LevelResult>(
      static_cast<int>(config.levels.size()), config.jobs, [&](int i) {
        const auto start = Clock::now();
        const FeSystem sys(Mesh::structured(config.levels[i]));
        const TimeGrid grid = TimeGrid::with_max_step(config.t_end, config.dt_for_level(i));
        const Trajectory traj = run(sys, ps, grid, exact.at(0.0), exact.f, opts);
        LevelResult r;
        r.row = error_report(traj, exact, sys, ps);
        r.row.runtime_s = config.timing ? seconds_since(start) : 0.0;
        r.bound = bound_held(traj);
        return r;
      });

  StudyResult out;
  out.name = "convergence";
  for (const auto& r : results) {
    out.table.rows.push_back(r.row);
    out.energy_bound_held = out.energy_bound_held && r.bound;
  }
  fill_eoc(out.table);
  const double threshold = spatial_threshold(config.p);
  out.verdicts.push_back(at_least("eoc_F", last_or_nan(out.table, &ErrorRow::eoc_F), threshold));
  if (config.p == 2.0)
    out.verdicts.push_back(at_least("eoc_u", last_or_nan(out.table, &ErrorRow::eoc_u), 0.9));
  return out;
}

StudyResult temporal_study(const StudyConfig& config)
{
  config.validate();
  const PStructure ps(config.p, config.delta);
  const ManufacturedSolution exact = manufactured(config.solution, ps);
  const SolverOptions opts = solver_options(config);
  const FeSystem sys(Mesh::structured(config.temporal_n));
  const double h = shape_metrics(sys.mesh()).h;

  const auto ref_start = Clock::now();
  const Trajectory reference = run(sys, ps, TimeGrid::with_max_step(config.temporal_t_end, config.temporal_ref_dt),
                                   exact.at(0.0), exact.f, opts);
  const double ref_time = seconds_since(ref_start);

  struct Result {
    ErrorRow row;
    bool bound = true;
  };
  const auto results = run_indexed<Result>(
      static_cast<int>(config.temporal_dts.size()), config.jobs, [&](int i) {
        const auto start = Clock::now();
        const Trajectory traj = run(sys, ps, TimeGrid::with_max_step(config.temporal_t_end, config.temporal_dts[i]),
                                    exact.at(0.0), exact.f, opts);
        Result r;
        r.row.h = h;
        r.row.dt = traj.grid.dt();
        r.row.err_u = temporal_error(sys, traj, reference);
        const int ratio = reference.grid.steps() / traj.grid.steps();
        double f_sum = 0.0;
        for (int n = 1; n <= traj.grid.steps(); ++n)
          f_sum += traj.grid.dt() *
                   compare_fields(sys, ps, traj.states[n], reference.states[n * ratio]).f_distance_sq;
        r.row.err_F = std::sqrt(f_sum);
        r.row.runtime_s = config.timing ? seconds_since(start) : 0.0;
        r.bound = bound_held(traj);
        return r;
      });

  StudyResult out;
  out.name = "convergence_temporal";
  out.energy_bound_held = bound_held(reference);
  for (const auto& r : results) {
    out.table.rows.push_back(r.row);
    out.energy_bound_held = out.energy_bound_held && r.bound;
  }
  fill_eoc_dt(out.table);
  out.verdicts.push_back(at_least("eoc_dt", last_or_nan(out.table, &ErrorRow::eoc_u), 0.9));
  out.verdicts.back().detail = "reference run " + std::to_string(config.timing ? ref_time : 0.0) + " s";
  return out;
}

StudyResult initval_study(const StudyConfig& config)
{
  config.validate();
  const PStructure ps(config.p, config.delta);
  const ManufacturedSolution exact = manufactured(config.solution, ps);
  const VectorFunction u0 = exact.at(0.0);
  const SolverOptions opts = solver_options(config);

  const auto rows = run_indexed<ErrorRow>(static_cast<int>(config.levels.size()), config.jobs, [&](int i) {
    const auto start = Clock::now();
    const FeSystem sys(Mesh::structured(config.levels[i]));
    const SolveResult r = project_initial(sys, ps, u0, opts);
    ErrorRow row;
    row.h = shape_metrics(sys.mesh()).h;
    row.err_u = l2_error(sys, r.velocity, u0.value);
    row.err_F = f_error(sys, ps, r.velocity, u0.gradient);
    row.runtime_s = config.timing ? seconds_since(start) : 0.0;
    return row;
  });
  StudyResult out;
  out.name = "initval";
  out.table.rows = rows;
  fill_eoc(out.table);
  out.verdicts.push_back(
      at_least("eoc_u", last_or_nan(out.table, &ErrorRow::eoc_u), 0.85 * std::min(1.0, 2.0 / config.p)));
  return out;
}

StudyResult interp_study(const StudyConfig& config)
{
  config.validate();
  const PStructure ps(config.p, config.delta);
  const VectorFunction v = manufactured(config.solution, ps).at(0.0);
  const auto rows = run_indexed<ErrorRow>(static_cast<int>(config.levels.size()), config.jobs, [&](int i) {
    const auto start = Clock::now();
    const FeSystem sys(Mesh::structured(config.levels[i]));
    const Field pi = interp_div(sys, v);
    ErrorRow row;
    row.h = shape_metrics(sys.mesh()).h;
    row.err_u = l2_error(sys, pi, v.value);
    row.err_F = f_error(sys, ps, pi, v.gradient);
    row.runtime_s = config.timing ? seconds_since(start) : 0.0;
    return row;
  });
  StudyResult out;
  out.name = "interp";
  out.table.rows = rows;
  fill_eoc(out.table);
  out.verdicts.push_back(at_least("eoc_l2", last_or_nan(out.table, &ErrorRow::eoc_u), 1.8));
  out.verdicts.push_back(at_least("eoc_F", last_or_nan(out.table, &ErrorRow::eoc_F), 0.9));
  return out;
}

StudyResult infsup_study(const StudyConfig& config)
{
  config.validate();
  const auto rows = run_indexed<ErrorRow>(static_cast<int>(config.levels.size()), config.jobs, [&](int i) {
    const auto start = Clock::now();
    const FeSystem sys(Mesh::structured(config.levels[i]));
    ErrorRow row;
    row.h = shape_metrics(sys.mesh()).h;
    row.err_u = inf_sup_constant(sys);
    row.err_F = kNoValue;
    row.runtime_s = config.timing ? seconds_since(start) : 0.0;
    return row;
  });
  StudyResult out;
  out.name = "infsup";
  out.table.rows = rows;
  double smallest = rows.front().err_u;
  for (const auto& r : rows)
    smallest = std::min(smallest, r.err_u);
  out.verdicts.push_back(at_least("beta_min", smallest, 0.1));
  if (rows.size() >= 2) {
    const double drift = std::abs(rows.back().err_u / rows[rows.size() - 2].err_u - 1.0);
    out.verdicts.push_back({"beta_ratio", drift <= 0.25, drift, 0.25, "|beta_last / beta_prev - 1|"});
  }
  return out;
}

RunOutcome single_run(const StudyConfig& config, bool zero_data)
{
  config.validate();
  const PStructure ps(config.p, config.delta);
  const ManufacturedSolution exact = manufactured(config.solution, ps);
  const FeSystem sys(Mesh::structured(config.levels.back()));
  const TimeGrid grid = TimeGrid::with_max_step(config.t_end, config.dt_for_level(config.levels.size() - 1));

  VectorFunction u0 = exact.at(0.0);
  SpaceTimeFunction f = exact.f;
  if (zero_data) {
    u0 = {[](const Point&) { return Eigen::Vector2d::Zero().eval(); },
          [](const Point&) { return Tensor2::Zero().eval(); }};
    f = [](double, const Point&) { return Eigen::Vector2d::Zero().eval(); };
  }
  RunOutcome out;
  out.trajectory = run(sys, ps, grid, u0, f, solver_options(config));
  if (!zero_data)
    out.errors = error_report(out.trajectory, exact, sys, ps);
  std::filesystem::create_directories(config.out);
  std::ofstream file(config.out + "/run_checkpoint.csv");
  write_checkpoint(file, out.trajectory);
  return out;
}

void write_study(const std::string& out_dir, const StudyResult& result)
{
  std::filesystem::create_directories(out_dir);
  std::ofstream csv(out_dir + "/" + result.name + ".csv");
  write_csv(csv, result.table);
  std::ofstream dat(out_dir + "/" + result.name + ".dat");
  write_dat(dat, result.table);
}

void write_verdicts(std::ostream& os, const StudyResult& result)
{
  os.precision(6);
  for (const Verdict& v : result.verdicts) {
    os << (v.pass ? "PASS " : "FAIL ") << result.name << '.' << v.name << ' ' << v.value << ' ' << v.threshold;
    if (!v.detail.empty())
      os << ' ' << v.detail;
    os << '\n';
  }
  if (!result.energy_bound_held)
    os << "FAIL " << result.name << ".energy_bound\n";
}

}  // namespace pstokes

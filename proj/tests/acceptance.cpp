// Acceptance suite: one PASS/FAIL line per criterion.
//
// Exits 0 iff the set of failing criteria equals the set given with
// --expect-red (empty by default), so a known red criterion stays visible
// in the output and turns the run red again should it ever pass.
#include "pstokes/assembly.hpp"
#include "pstokes/inf_sup.hpp"
#include "pstokes/studies.hpp"

#include <CLI11.hpp>

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

namespace {

using namespace pstokes;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what)
  {
    pass = pass && ok;
    if (!detail.empty())
      detail += "; ";
    detail += std::string(ok ? "" : "[fail] ") + what;
  }
};

std::string fmt(double v)
{
  std::ostringstream os;
  os << std::setprecision(4) << v;
  return os.str();
}

bool g_energy_ok = true;
int g_energy_runs = 0;
std::string g_out = "acceptance_out";

StudyConfig base(double p, double delta)
{
  StudyConfig c;
  c.p = p;
  c.delta = delta;
  c.out = g_out;
  c.timing = true;
  return c;
}

void note_energy(const StudyResult& r, int runs)
{
  g_energy_ok = g_energy_ok && r.energy_bound_held;
  g_energy_runs += runs;
}

// Checks every verdict of a study and the runtime target.
void absorb(Outcome& o, const StudyResult& r, const std::string& label, double seconds, double limit_s)
{
  write_study(g_out + "/" + label, r);
  for (const Verdict& v : r.verdicts)
    o.require(v.pass, label + " " + v.name + " " + fmt(v.value) + " >= " + fmt(v.threshold));
  o.require(seconds <= limit_s, label + " runtime " + fmt(seconds) + " s <= " + fmt(limit_s) + " s");
}

double elapsed(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Outcome spatial(double p, double delta, double limit_s)
{
  Outcome o;
  const StudyConfig c = base(p, delta);
  const auto t0 = Clock::now();
  try {
    const StudyResult r = convergence_study(c);
    note_energy(r, static_cast<int>(c.levels.size()));
    std::ostringstream label;
    label << "spatial_p" << p;
    absorb(o, r, label.str(), elapsed(t0), limit_s);
  } catch (const StepFailure& e) {
    g_energy_ok = g_energy_ok && std::string(e.what()).find("energy bound") == std::string::npos;
    o.require(false, e.what());
  }
  return o;
}

Outcome temporal()
{
  Outcome o;
  for (double p : {1.5, 3.0}) {
    const auto t0 = Clock::now();
    try {
      const StudyResult r = temporal_study(base(p, 0.01));
      note_energy(r, 5);
      absorb(o, r, "temporal_p" + fmt(p), elapsed(t0), 15 * 60);
    } catch (const StepFailure& e) {
      g_energy_ok = g_energy_ok && std::string(e.what()).find("energy bound") == std::string::npos;
      o.require(false, e.what());
    }
  }
  return o;
}

Outcome initval()
{
  Outcome o;
  const auto t0 = Clock::now();
  for (double p : {1.5, 2.0, 3.0}) {
    StudyConfig c = base(p, p == 2.0 ? 0.0 : 0.01);
    c.levels = {4, 8, 16, 32};
    const StudyResult r = initval_study(c);
    write_study(g_out + "/initval_p" + fmt(p), r);
    for (const Verdict& v : r.verdicts)
      o.require(v.pass, "p=" + fmt(p) + " eoc " + fmt(v.value) + " >= " + fmt(v.threshold));
  }
  o.require(elapsed(t0) <= 120, "runtime " + fmt(elapsed(t0)) + " s <= 120 s");
  return o;
}

Outcome interpolation()
{
  Outcome o;
  const auto t0 = Clock::now();
  for (double p : {1.5, 3.0}) {
    const StudyResult r = interp_study(base(p, 0.01));
    write_study(g_out + "/interp_p" + fmt(p), r);
    for (const Verdict& v : r.verdicts)
      o.require(v.pass, "p=" + fmt(p) + " " + v.name + " " + fmt(v.value) + " >= " + fmt(v.threshold));
  }
  o.require(elapsed(t0) <= 60, "runtime " + fmt(elapsed(t0)) + " s <= 60 s");
  return o;
}

Outcome divergence_preservation()
{
  Outcome o;
  const BandTable bands = BandTable::read_file(std::string(PSTOKES_FIXTURE_DIR) + "/fem_bands.txt");
  const PropertyReport r = fem_properties(bands, 2, 20);
  for (const Check& c : r.checks)
    if (c.name == "divergence_preservation" || c.name == "p1_reproduction")
      o.require(c.pass, c.name + " " + fmt(c.value) + " <= " + fmt(c.limit));
  return o;
}

// Smallest nonzero eigenvalue of B A^-1 B^T against M_p, from scratch with
// dense linear algebra.
double dense_inf_sup(const FeSystem& sys)
{
  const Eigen::MatrixXd a(assemble_stiffness(sys));
  const Eigen::MatrixXd b(assemble_divergence(sys));
  const Eigen::MatrixXd s = b * a.llt().solve(b.transpose());
  const Eigen::MatrixXd mp(sys.pressure_mass());
  const Eigen::MatrixXd l = mp.llt().matrixL();
  const Eigen::MatrixXd linv = l.inverse();
  Eigen::VectorXd one = l.transpose() * Eigen::VectorXd::Ones(s.rows());
  one.normalize();
  const Eigen::MatrixXd proj = Eigen::MatrixXd::Identity(s.rows(), s.rows()) - one * one.transpose();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(proj * linv * s * linv.transpose() * proj);
  Eigen::VectorXd ev = eig.eigenvalues();
  std::sort(ev.data(), ev.data() + ev.size());
  return std::sqrt(ev[1]);
}

Outcome inf_sup()
{
  Outcome o;
  StudyConfig c = base(2, 0);
  c.levels = {8, 16};
  const StudyResult r = infsup_study(c);
  write_study(g_out + "/infsup", r);
  for (const Verdict& v : r.verdicts)
    o.require(v.pass, v.name + " " + fmt(v.value) + " vs " + fmt(v.threshold));
  const FeSystem sys(Mesh::structured(2));
  const double diff = std::abs(dense_inf_sup(sys) - inf_sup_constant(sys));
  o.require(diff <= 1e-8, "dense oracle n=2 |diff| " + fmt(diff) + " <= 1e-8");
  return o;
}

Outcome property_suites()
{
  Outcome o;
  const auto t0 = Clock::now();
  const PropertyReport r = run_property_suite(PSTOKES_FIXTURE_DIR, 2, 10000);
  std::filesystem::create_directories(g_out);
  std::ofstream file(g_out + "/properties_report.txt");
  r.write(file);
  o.require(r.passed(), std::to_string(r.checks.size() - r.failures()) + "/" + std::to_string(r.checks.size()) +
                            " checks pass");
  std::string failed;
  for (const Check& c : r.checks)
    if (!c.pass)
      failed += (failed.empty() ? "" : ", ") + c.name + "=" + fmt(c.value);
  if (!failed.empty())
    o.detail += " (failing: " + failed + ")";
  o.require(elapsed(t0) <= 120, "runtime " + fmt(elapsed(t0)) + " s <= 120 s");
  return o;
}

Outcome energy_bound()
{
  Outcome o;
  o.require(g_energy_ok, "bound held at every step of " + std::to_string(g_energy_runs) + " runs");
  o.require(g_energy_runs > 0, "runs checked");
  return o;
}

Outcome delta_uniformity()
{
  Outcome o;
  const FeSystem sys(Mesh::structured(16));
  const TimeGrid grid(0.5, 16);
  std::vector<double> totals;
  for (double delta : {0.0, 1e-3, 1e-1}) {
    const PStructure ps(1.5, delta);
    const ManufacturedSolution exact = manufactured("stream1", ps);
    try {
      const Trajectory traj = run(sys, ps, grid, exact.at(0.0), exact.f);
      ++g_energy_runs;
      const ErrorRow e = error_report(traj, exact, sys, ps);
      totals.push_back(e.err_u + e.err_F);
      o.detail += (o.detail.empty() ? "" : ", ") + std::string("delta=") + fmt(delta) + ": " + fmt(totals.back());
    } catch (const StepFailure& e) {
      g_energy_ok = g_energy_ok && std::string(e.what()).find("energy bound") == std::string::npos;
      o.require(false, e.what());
      return o;
    }
  }
  const double spread = *std::max_element(totals.begin(), totals.end()) /
                        *std::min_element(totals.begin(), totals.end());
  o.require(spread <= 3.0, "max/min " + fmt(spread) + " <= 3");
  return o;
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Acceptance criteria"};
  std::vector<int> expect_red;
  std::vector<int> only;
  app.add_option("--expect-red", expect_red, "Criteria known to fail");
  app.add_option("--only", only, "Run a subset of the criteria");
  app.add_option("--out", g_out, "Directory for the study tables");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"spatial rate p=2 delta=0", [] { return spatial(2, 0, 10 * 60); }},
      {"spatial rate p=1.5 delta=0.01", [] { return spatial(1.5, 0.01, 15 * 60); }},
      {"spatial rate p=3 delta=0.01", [] { return spatial(3, 0.01, 20 * 60); }},
      {"temporal rate n=32 p=1.5,3", temporal},
      {"initial-value projection rate", initval},
      {"interpolation rates", interpolation},
      {"divergence preservation and P1 reproduction", divergence_preservation},
      {"inf-sup stability p=2", inf_sup},
      {"algebraic property suites", property_suites},
      {"energy bound", energy_bound},
      {"delta-uniformity p=1.5", delta_uniformity},
  };

  // The energy criterion collects the runs of all others, so it goes last.
  std::vector<int> order;
  for (int id = 1; id <= static_cast<int>(criteria.size()); ++id)
    if (id != 10 && (only.empty() || std::find(only.begin(), only.end(), id) != only.end()))
      order.push_back(id);
  if (only.empty() || std::find(only.begin(), only.end(), 10) != only.end())
    order.push_back(10);

  std::set<int> failed;
  std::map<int, std::string> lines;
  for (int id : order) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = criteria[id - 1].second();
    } catch (const std::exception& e) {
      o.require(false, std::string("error: ") + e.what());
    }
    if (!o.pass)
      failed.insert(id);
    std::ostringstream line;
    line << (o.pass ? "PASS " : "FAIL ") << std::setw(2) << id << "  " << criteria[id - 1].first << "  ("
         << std::fixed << std::setprecision(1) << elapsed(t0) << " s)  " << std::defaultfloat << o.detail;
    std::cerr << line.str() << std::endl;
    lines[id] = line.str();
  }
  for (const auto& [id, line] : lines)
    std::cout << line << '\n';

  std::set<int> expected(expect_red.begin(), expect_red.end());
  if (!only.empty()) {
    std::set<int> subset;
    for (int id : expected)
      if (std::find(only.begin(), only.end(), id) != only.end())
        subset.insert(id);
    expected = subset;
  }
  std::cout << failed.size() << " criteria red";
  if (!expected.empty()) {
    std::cout << " (expected red:";
    for (int id : expected)
      std::cout << ' ' << id;
    std::cout << ')';
  }
  std::cout << '\n';
  return failed == expected ? 0 : 1;
}

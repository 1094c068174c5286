// Batch front end: property suites, rate studies and single runs.
// Exit codes: 0 all thresholds pass, 1 a threshold failed, 2 usage or config
// error, 3 solver failure.
#include "pstokes/studies.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#ifndef PSTOKES_FIXTURE_DIR
#define PSTOKES_FIXTURE_DIR "."
#endif

namespace {

using namespace pstokes;

enum Exit { kPass = 0, kThreshold = 1, kUsage = 2, kSolver = 3 };

struct Overrides {
  std::string config_file;
  std::vector<std::pair<std::string, std::string>> assignments;
};

// Registers a flag whose value is forwarded to StudyConfig::set.
void add_override(CLI::App& app, Overrides& o, const std::string& flag, const std::string& key,
                  const std::string& help)
{
  app.add_option_function<std::string>(
      flag, [&o, key](const std::string& v) { o.assignments.emplace_back(key, v); }, help);
}

StudyConfig load(const Overrides& o)
{
  StudyConfig c = o.config_file.empty() ? StudyConfig{} : StudyConfig::parse_file(o.config_file);
  for (const auto& [key, value] : o.assignments)
    c.set(key, value);
  c.validate();
  return c;
}

int finish(const StudyConfig& config, const std::vector<StudyResult>& results)
{
  std::ostringstream report;
  bool pass = true;
  for (const StudyResult& r : results) {
    write_study(config.out, r);
    write_verdicts(report, r);
    pass = pass && r.passed();
  }
  std::filesystem::create_directories(config.out);
  std::ofstream(config.out + "/report.txt") << report.str();
  std::cout << report.str();
  return pass ? kPass : kThreshold;
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"p-Stokes finite element lab"};
  app.require_subcommand(1);
  Overrides o;
  bool no_timing = false;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config_file, "key = value configuration file");
    add_override(*sub, o, "--p", "p", "Exponent p > 1");
    add_override(*sub, o, "--delta", "delta", "Shift delta in [0, 1]");
    add_override(*sub, o, "--levels", "levels", "Mesh levels, e.g. 8,16,32,64");
    add_override(*sub, o, "--dt-couple", "dt_couple", "c in dt = c h^min{1,2/p}");
    add_override(*sub, o, "--T", "T", "End time");
    add_override(*sub, o, "--tol", "tol", "Relative Newton tolerance");
    add_override(*sub, o, "--out", "out", "Output directory");
    add_override(*sub, o, "--jobs", "jobs", "Worker threads");
    add_override(*sub, o, "--seed", "seed", "Random seed");
    sub->add_flag("--no-timing", no_timing, "Write 0 runtimes (byte-reproducible tables)");
  };

  auto* properties = app.add_subcommand("properties", "N-function, field and FE property suites");
  std::string fixtures = PSTOKES_FIXTURE_DIR;
  int samples = 1000;
  common(properties);
  properties->add_option("--fixtures", fixtures, "Directory with the calibrated bands");
  properties->add_option("--samples", samples, "Random samples per (p, delta)")->check(CLI::PositiveNumber);

  auto* interp = app.add_subcommand("interp-study", "Rates of the divergence preserving interpolant");
  auto* infsup = app.add_subcommand("infsup", "Discrete inf-sup constants");
  auto* initval = app.add_subcommand("initval-study", "Rate of the initial-value projection");
  auto* convergence = app.add_subcommand("convergence", "Space-time error study");
  std::string which = "both";
  convergence->add_option("--study", which, "spatial, temporal or both")
      ->check(CLI::IsMember({"spatial", "temporal", "both"}));
  auto* single = app.add_subcommand("run", "Single trajectory on the finest level with checkpoint dump");
  bool zero_data = false;
  single->add_flag("--zero-data", zero_data, "u0 = 0 and f = 0");
  for (auto* sub : {interp, infsup, initval, convergence, single})
    common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  try {
    if (no_timing)
      o.assignments.emplace_back("timing", "false");
    const StudyConfig config = load(o);

    if (properties->parsed()) {
      const PropertyReport report = run_property_suite(fixtures, config.seed, samples);
      std::filesystem::create_directories(config.out);
      std::ofstream file(config.out + "/report.txt");
      report.write(file);
      report.write(std::cout);
      return report.passed() ? kPass : kThreshold;
    }
    if (interp->parsed())
      return finish(config, {interp_study(config)});
    if (infsup->parsed())
      return finish(config, {infsup_study(config)});
    if (initval->parsed())
      return finish(config, {initval_study(config)});
    if (convergence->parsed()) {
      std::vector<StudyResult> results;
      if (which != "temporal")
        results.push_back(convergence_study(config));
      if (which != "spatial")
        results.push_back(temporal_study(config));
      return finish(config, results);
    }
    const RunOutcome r = single_run(config, zero_data);
    std::cout << "steps " << r.trajectory.grid.steps() << " dt " << r.trajectory.grid.dt() << " checkpoint "
              << config.out << "/run_checkpoint.csv\n";
    return kPass;
  } catch (const ConfigError& e) {
    std::cerr << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << '\n';
    return kUsage;
  } catch (const StepFailure& e) {
    std::cerr << "solver failure at step " << e.step << ": " << e.what() << '\n';
    return kSolver;
  } catch (const std::exception& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kSolver;
  }
}

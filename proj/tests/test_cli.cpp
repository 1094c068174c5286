#include "pstokes/config.hpp"
#include "pstokes/studies.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace pstokes;

namespace {

std::string slurp(const std::filesystem::path& path)
{
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cli(const std::string& args)
{
  const int status = std::system((std::string(PSTOKES_CLI) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::filesystem::path scratch(const std::string& name)
{
  const auto dir = std::filesystem::temp_directory_path() / ("pstokes_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("config defaults and dt coupling")
{
  StudyConfig c;
  CHECK_NOTHROW(c.validate());
  CHECK(c.dt_for_level(0) == doctest::Approx(0.125 * std::sqrt(2.0) / 8));
  c.p = 3;
  CHECK(c.dt_for_level(1) == doctest::Approx(0.125 * std::pow(std::sqrt(2.0) / 16, 2.0 / 3)));
  c.dt_list = {0.1, 0.05, 0.025, 0.0125};
  CHECK(c.dt_for_level(2) == 0.025);
}

TEST_CASE("config validation")
{
  auto rejects = [](auto mutate) {
    StudyConfig c;
    mutate(c);
    CHECK_THROWS_AS(c.validate(), ConfigError);
  };
  rejects([](StudyConfig& c) { c.p = 1.0; });
  rejects([](StudyConfig& c) { c.delta = 1.5; });
  rejects([](StudyConfig& c) { c.levels = {8, 12}; });
  rejects([](StudyConfig& c) { c.levels = {16, 8}; });
  rejects([](StudyConfig& c) { c.levels = {}; });
  rejects([](StudyConfig& c) { c.dt_list = {0.1}; });
  rejects([](StudyConfig& c) { c.dt_list = {0.1, 0.1, 0.5, 0.1}; });
  rejects([](StudyConfig& c) { c.dt_couple = 10; });
  rejects([](StudyConfig& c) { c.jobs = 0; });
  rejects([](StudyConfig& c) { c.temporal_dts = {0.25, 0.6}; });

  StudyConfig c;
  CHECK_THROWS_AS(c.set("bogus", "1"), ConfigError);
  CHECK_THROWS_AS(c.set("p", "abc"), ConfigError);
  CHECK_THROWS_AS(c.set("levels", "4,x"), ConfigError);
  std::istringstream no_eq("p 2\n");
  CHECK_THROWS_AS(StudyConfig::parse(no_eq), ConfigError);
  CHECK_THROWS_AS(StudyConfig::parse_file("/nonexistent/pstokes.cfg"), ConfigError);
}

TEST_CASE("config parse, serialize, parse is the identity")
{
  std::istringstream text("# a study\np = 1.5\ndelta=0.01  # shift\nlevels = 4, 8,16\n\ndt_couple = 0.1\n"
                          "T = 0.3\nsolution = stream1\ntol = 1e-11\nout = some/dir\njobs = 3\nseed = 99\n"
                          "timing = false\ntemporal_dts = 0.2,0.1\ntemporal_ref_dt = 0.0125\n");
  const StudyConfig c = StudyConfig::parse(text);
  CHECK(c.p == 1.5);
  CHECK(c.levels == std::vector<int>{4, 8, 16});
  CHECK(c.tol == 1e-11);
  CHECK(!c.timing);
  CHECK(c.out == "some/dir");

  for (StudyConfig cfg : {StudyConfig{}, c}) {
    cfg.dt_couple = 0.1 / 3.0;  // not representable in short decimal form
    std::ostringstream os;
    cfg.serialize(os);
    std::istringstream is(os.str());
    const StudyConfig back = StudyConfig::parse(is);
    CHECK(back == cfg);
    std::ostringstream again;
    back.serialize(again);
    CHECK(again.str() == os.str());
  }
}

TEST_CASE("spatial thresholds")
{
  CHECK(spatial_threshold(2) == 0.9);
  CHECK(spatial_threshold(1.5) == 0.85);
  CHECK(spatial_threshold(3) == doctest::Approx(0.55));
}

TEST_CASE("cli exit codes")
{
  const auto out = scratch("codes");
  CHECK(cli("") == 2);
  CHECK(cli("nonsense") == 2);
  CHECK(cli("infsup --p 0.5 --out " + out.string()) == 2);
  CHECK(cli("infsup --levels 3,6 --out " + out.string()) == 2);
  CHECK(cli("infsup --config /nonexistent.cfg --out " + out.string()) == 2);
  CHECK(cli("infsup --levels 4,8 --out " + out.string()) == 0);
  CHECK(std::filesystem::exists(out / "infsup.csv"));
  CHECK(std::filesystem::exists(out / "infsup.dat"));
  CHECK(slurp(out / "report.txt").find("PASS infsup.beta_min") != std::string::npos);
  // Too coarse for the asymptotic rate: a threshold failure, not an error.
  CHECK(cli("interp-study --levels 1,2 --out " + out.string()) == 1);
}

TEST_CASE("cli config file with flag overrides")
{
  const auto out = scratch("config");
  std::filesystem::create_directories(out);
  std::ofstream(out / "study.cfg") << "levels = 4,8\np = 3\nout = " << (out / "from_file").string() << '\n';
  CHECK(cli("interp-study --config " + (out / "study.cfg").string() + " --levels 8,16 --no-timing") == 0);
  const std::string csv = slurp(out / "from_file" / "interp.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  CHECK(csv.find("0.1767766953,") != std::string::npos);  // h of n = 8
}

TEST_CASE("cli outputs are deterministic")
{
  const auto a = scratch("det_a"), b = scratch("det_b"), c = scratch("det_c");
  const std::string args = "convergence --study spatial --p 1.5 --delta 0.01 --levels 4,8 --T 0.2 --no-timing";
  cli(args + " --out " + a.string());
  cli(args + " --out " + b.string());
  cli(args + " --jobs 2 --out " + c.string());
  const std::string first = slurp(a / "convergence.csv");
  CHECK(!first.empty());
  CHECK(first == slurp(b / "convergence.csv"));
  CHECK(first == slurp(c / "convergence.csv"));
  CHECK(slurp(a / "convergence.dat") == slurp(b / "convergence.dat"));
}

TEST_CASE("cli run with zero data writes all-zero checkpoint rows")
{
  const auto out = scratch("run");
  CHECK(cli("run --zero-data --levels 4 --T 0.25 --out " + out.string()) == 0);
  std::istringstream in(slurp(out / "run_checkpoint.csv"));
  std::string line;
  std::getline(in, line);
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(line.substr(line.find(',', line.find(',') + 1)) == ",0,0,0,0");
  }
  CHECK(rows > 1);
}

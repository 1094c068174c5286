// Writes the frozen bands used by the property suites:
// nfunc_bands_p<p>.txt for p in {1.5, 2, 3} and fem_bands.txt.
#include "pstokes/properties.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

int main(int argc, char** argv)
{
  CLI::App app{"Calibrate the property-suite bands"};
  std::string out = ".";
  std::uint64_t seed = 1;
  int samples = 10000;
  double margin = 1.25;
  app.add_option("--out", out, "Fixture directory")->required();
  app.add_option("--seed", seed, "Calibration seed");
  app.add_option("--samples", samples, "Samples per (p, delta)");
  app.add_option("--margin", margin, "Multiplicative widening of the observed ranges")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  for (double p : {1.5, 2.0, 3.0}) {
    const std::string path = out + "/" + pstokes::band_file_name(p);
    std::ofstream file(path);
    pstokes::calibrate_nfunc_bands(p, seed, samples, margin).write(file);
    std::cout << "wrote " << path << '\n';
  }
  const std::string path = out + "/fem_bands.txt";
  std::ofstream file(path);
  pstokes::calibrate_fem_bands(seed, 20, margin).write(file);
  std::cout << "wrote " << path << '\n';
}

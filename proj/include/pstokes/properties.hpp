#ifndef PSTOKES_PROPERTIES_HPP
#define PSTOKES_PROPERTIES_HPP

#include "pstokes/fe_system.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace pstokes {

/// Shifts for which the property suites run.
inline const std::vector<double> kSuiteDeltas = {0.0, 0.01, 1.0};
/// Epsilons of the Young inequality checks.
inline const std::vector<double> kYoungEpsilons = {1.0, 0.5, 0.1};

struct Band {
  double lower = 0.0;
  double upper = 0.0;
};

/// Named two-sided bounds, stored as `name lower upper` lines.
class BandTable {
public:
  void set(const std::string& name, Band band) { bands_[name] = band; }
  bool contains(const std::string& name) const { return bands_.count(name) > 0; }
  /// Throws std::out_of_range for unknown names.
  const Band& at(const std::string& name) const;
  const std::map<std::string, Band>& bands() const { return bands_; }

  /// Throws std::runtime_error on malformed lines.
  static BandTable read(std::istream& is);
  static BandTable read_file(const std::string& path);
  void write(std::ostream& os) const;

private:
  std::map<std::string, Band> bands_;
};

/// `nfunc_bands_p<p>.txt`, with p printed in shortest form (1.5, 2, 3).
std::string band_file_name(double p);

/// Observed range of every calibrated quantity of the N-function suite for
/// one p, over all kSuiteDeltas. For the Young entries `young_eps_<e>` the
/// upper value is the smallest admissible c_eps on the samples.
BandTable measure_nfunc_quantities(double p, std::uint64_t seed, int samples);

/// measure_nfunc_quantities widened by `margin` (> 1) on both sides.
BandTable calibrate_nfunc_bands(double p, std::uint64_t seed, int samples, double margin = 1.25);

/// Sampled range of the local W^{1,1} stability ratio of interp_div.
BandTable measure_fem_quantities(std::uint64_t seed, int fields);
BandTable calibrate_fem_bands(std::uint64_t seed, int fields, double margin = 1.25);

struct Check {
  std::string name;
  bool pass = false;
  double value = 0.0;  ///< worst observed value
  double limit = 0.0;  ///< threshold it was compared against
  std::string detail;
};

struct PropertyReport {
  std::vector<Check> checks;

  bool passed() const;
  int failures() const;
  void add(Check c) { checks.push_back(std::move(c)); }
  void append(const PropertyReport& other);
  /// One `PASS|FAIL name value limit detail` line per check.
  void write(std::ostream& os) const;
};

/// Random tensor with entries uniform in [-2, 2].
Tensor2 random_tensor(std::mt19937_64& rng);

/// N-function, stress and F checks for one (p, delta).
PropertyReport nfunc_properties(const PStructure& ps, const BandTable& bands, std::uint64_t seed, int samples);

/// Field-level comparison of F-distance and L^p distance of symmetric
/// gradients on random finite element fields. The general-pair check follows
/// the constant-free estimates literally; the pair (u, 0) is checked
/// separately.
PropertyReport field_properties(const PStructure& ps, std::uint64_t seed, int pairs, int n = 8);

/// Finite element checks: partition of unity, bubble trace, divergence
/// preservation, P1 reproduction, local W^{1,1} stability.
PropertyReport fem_properties(const BandTable& bands, std::uint64_t seed, int fields);

/// Smooth random zero-trace vector field on the unit square, with gradient.
VectorFunction random_smooth_field(std::mt19937_64& rng);

/// The full default suite: nfunc_properties and field_properties for
/// p in {1.5, 2, 3} and every delta in kSuiteDeltas, plus fem_properties.
/// Bands are read from `fixture_dir`.
PropertyReport run_property_suite(const std::string& fixture_dir, std::uint64_t seed, int samples);

}  // namespace pstokes

#endif

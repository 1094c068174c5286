#ifndef PSTOKES_CONFIG_HPP
#define PSTOKES_CONFIG_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pstokes {

/// Malformed or inconsistent study configuration.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Parameters of a study. Flat `key = value` file format; `#` starts a
/// comment. Lists are comma separated.
struct StudyConfig {
  double p = 2.0;
  double delta = 0.0;
  std::vector<int> levels = {8, 16, 32, 64};
  /// dt = dt_couple * h^min{1, 2/p} unless dt_list is given (one entry per
  /// level).
  double dt_couple = 0.125;
  std::vector<double> dt_list;
  double t_end = 0.5;
  std::string solution = "stream1";
  double tol = 1e-10;
  std::string out = "out";
  int jobs = 1;
  std::uint64_t seed = 2;
  bool timing = true;

  // temporal part of the convergence study
  int temporal_n = 32;
  double temporal_t_end = 1.0;
  std::vector<double> temporal_dts = {0.25, 0.125, 0.0625, 0.03125};
  double temporal_ref_dt = 1.0 / 256.0;

  /// Time step for a mesh level.
  double dt_for_level(std::size_t index) const;

  /// Throws ConfigError if an invariant is violated: p > 1, delta in
  /// [0, 1], every dt < 0.5, levels strictly increasing powers of 2,
  /// jobs >= 1, positive times and tolerances.
  void validate() const;

  /// Applies one `key = value` assignment. Throws ConfigError.
  void set(const std::string& key, const std::string& value);

  static StudyConfig parse(std::istream& is);
  static StudyConfig parse_file(const std::string& path);
  /// Writes every key; parse(serialize(c)) == c.
  void serialize(std::ostream& os) const;

  bool operator==(const StudyConfig&) const = default;
};

}  // namespace pstokes

#endif

#ifndef PSTOKES_STUDIES_HPP
#define PSTOKES_STUDIES_HPP

#include "pstokes/config.hpp"
#include "pstokes/properties.hpp"
#include "pstokes/verify.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace pstokes {

/// Pass/fail verdict of one acceptance threshold of a study.
struct Verdict {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct StudyResult {
  std::string name;  ///< file stem of the table, e.g. "convergence"
  ErrorTable table;
  std::vector<Verdict> verdicts;
  /// Energy bound held at every step of every run of the study.
  bool energy_bound_held = true;

  bool passed() const;
};

/// Spatial-temporal rate study: one run per mesh level with the level's dt,
/// error_report per run, EOCs between levels. Independent levels run on up
/// to `jobs` threads; rows are ordered by level. Verdict: last eoc_F (and
/// for p = 2 also eoc_u) at least spatial_threshold(p).
StudyResult convergence_study(const StudyConfig& config);

/// Temporal study on a fixed mesh: sup_n || U_dt^n - U_ref^n ||_{L2} and the
/// matching F-distance against a fine-dt reference run. Rows have h fixed
/// and EOCs taken with respect to dt. Verdict: last EOC >= 0.9.
StudyResult temporal_study(const StudyConfig& config);

/// || u0 - U^0 ||_{L2} and || F(Du0) - F(DU^0) ||_{L2} of the initial-value
/// projection over the levels. Verdict: last err_u EOC >= 0.85 min{1, 2/p}.
StudyResult initval_study(const StudyConfig& config);

/// || v - Pi v ||_{L2} and || F(Dv) - F(D Pi v) ||_{L2} for the divergence
/// preserving interpolant of v = u0. Verdicts: L2 EOC >= 1.8, F EOC >= 0.9.
StudyResult interp_study(const StudyConfig& config);

/// beta_h per level (err_u column holds beta_h, err_F is unused).
/// Verdicts: beta_h >= 0.1 and |beta_last / beta_prev - 1| <= 0.25.
StudyResult infsup_study(const StudyConfig& config);

/// Threshold on the spatial EOC of the F error: 0.9 at p = 2, 0.85 for
/// p < 2 and 0.825 (2/p) for p > 2.
double spatial_threshold(double p);

/// Single trajectory on the finest level (or, if `zero_data`, with u0 = 0
/// and f = 0). Writes `<out>/run_checkpoint.csv`.
struct RunOutcome {
  Trajectory trajectory;
  ErrorRow errors;
};
RunOutcome single_run(const StudyConfig& config, bool zero_data);

/// Writes `<out>/<name>.csv` and `<out>/<name>.dat`.
void write_study(const std::string& out_dir, const StudyResult& result);

/// Appends one line per verdict.
void write_verdicts(std::ostream& os, const StudyResult& result);

}  // namespace pstokes

#endif

#ifndef SPECTRALOSS_ENSEMBLE_HPP
#define SPECTRALOSS_ENSEMBLE_HPP

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "spectraloss/grid.hpp"

namespace spectraloss {

/// UTC timestamps as seconds since the Unix epoch.
using TimePoint = std::int64_t;

/// Accepts `YYYY-MM-DDTHH:MM:SSZ` and the basic form `YYYYMMDDTHHMMSSZ`.
TimePoint parse_time_iso(const std::string& s);
std::string format_time_iso(TimePoint t);

/// Ensemble of member forecasts sharing one verifying field.
struct EnsembleSet {
  std::vector<GridField> members;
  GridField verification;
  TimePoint valid_time = 0;
  double lead_hours = 0.0;
  std::vector<double> member_lag_hours;  // init offsets from the central member
};

void validate_ensemble(const EnsembleSet& ens);

/// Fair CRPS: sum_ij dA [ mean_k |x_k - y| - spread / (2 Ne (Ne-1)) ].
/// The fair estimator subtracts the spread term; paper_sign = true uses "+"
/// instead, matching a published variant of the formula, for comparison.
double fair_crps(const EnsembleSet& ens, bool paper_sign = false);

/// Ensemble-mean RMS error sqrt( sum_ij dA (xbar - y)^2 ).
double ermse(const EnsembleSet& ens);

/// Spread-error ratio, computed after grid averaging; throws
/// undefined_score_error when the ensemble-mean error vanishes.
double ser(const EnsembleSet& ens);

struct UbErmseResult {
  double value = 0.0;
  bool clamped = false;  // true when the pre-sqrt aggregate was negative
};

/// Unbiased ensemble RMSE: the pointwise spread correction is subtracted
/// before grid aggregation; a negative aggregate clamps to 0 with a flag.
UbErmseResult ub_ermse(const EnsembleSet& ens);

struct ScoreRow {
  TimePoint valid_time = 0;
  double lead_hours = 0.0;
  double crps = 0.0;
  double ermse = 0.0;
  double ser = 0.0;
  double ubermse = 0.0;
};

ScoreRow score_ensemble(const EnsembleSet& ens, bool paper_sign = false);

struct ScoreSeries {
  std::vector<ScoreRow> rows;
};

/// CSV: `valid_time,lead_h,crps,ermse,ser,ubermse`.
void write_scores_csv(const ScoreSeries& series, std::ostream& out);
ScoreSeries read_scores_csv(const std::string& path);

struct LaggedBuildResult {
  std::vector<EnsembleSet> ensembles;
  int skipped = 0;  // candidate ensembles dropped for missing members
};

/// Build lagged ensembles from an archive laid out as
///   <root>/init_<ISO8601>/lead_<hours>.sgf
/// A candidate is every (central init, central lead) present in the archive;
/// the window members are the forecasts initialized at offsets
/// 0, +-stride, ..., +-(window-1)/2 * stride valid at the same time, and the
/// verifying field is lead_0 of the valid time's own init.  Incomplete
/// candidates are skipped and counted.
LaggedBuildResult build_lagged_ensembles(const std::string& root, int window = 9,
                                         int stride_hours = 12);

struct ScoreSignificance {
  std::string score;
  double mean_diff = 0.0;  // b - a
  double lo90 = 0.0;
  double hi90 = 0.0;
  bool significant = false;
};

/// Two-sided percentile bootstrap at 90% on the per-date score differences,
/// resampling `fraction` of the dates each time.  Deterministic for a fixed
/// seed.
std::vector<ScoreSignificance> bootstrap_significance(const ScoreSeries& a, const ScoreSeries& b,
                                                      double fraction = 1.0 / 3.0,
                                                      int resamples = 1000,
                                                      std::uint64_t seed = 12345);

}  // namespace spectraloss

#endif

#include "spectraloss/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "spectraloss/csvfmt.hpp"
#include "spectraloss/errors.hpp"
#include "spectraloss/io.hpp"
#include "spectraloss/rng.hpp"

namespace spectraloss {

namespace {

std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2u) / 5u + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  m = static_cast<int>(mp < 10 ? mp + 3 : mp - 9);
  y = static_cast<int>(yy + (m <= 2));
}

}  // namespace

TimePoint parse_time_iso(const std::string& s) {
  int y, mo, d, h, mi, se;
  if (std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2dZ", &y, &mo, &d, &h, &mi, &se) != 6 &&
      std::sscanf(s.c_str(), "%4d%2d%2dT%2d%2d%2dZ", &y, &mo, &d, &h, &mi, &se) != 6)
    throw format_error("unparseable ISO8601 time: " + s);
  if (mo < 1 || mo > 12 || d < 1 || d > 31 || h < 0 || h > 23 || mi < 0 || mi > 59 || se < 0 ||
      se > 60)
    throw format_error("out-of-range ISO8601 time: " + s);
  return days_from_civil(y, mo, d) * 86400 + h * 3600 + mi * 60 + se;
}

std::string format_time_iso(TimePoint t) {
  std::int64_t days = t / 86400;
  std::int64_t rem = t % 86400;
  if (rem < 0) {
    rem += 86400;
    days -= 1;
  }
  int y, mo, d;
  civil_from_days(days, y, mo, d);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ", y, mo, d,
                static_cast<int>(rem / 3600), static_cast<int>(rem / 60 % 60),
                static_cast<int>(rem % 60));
  return buf;
}

void validate_ensemble(const EnsembleSet& ens) {
  if (ens.members.size() < 2)
    throw parameter_error("ensemble needs at least 2 members");
  for (const auto& m : ens.members) check_same_grid(m, ens.verification);
}

double fair_crps(const EnsembleSet& ens, bool paper_sign) {
  validate_ensemble(ens);
  const int ne = static_cast<int>(ens.members.size());
  const Grid& grid = ens.verification.grid;
  const int nlat = grid.nlat, nlon = grid.nlon;
  const double spread_norm = 1.0 / (static_cast<double>(ne) * (ne - 1));
  std::vector<double> row_sum(nlat, 0.0);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < nlat; ++i) {
    double acc = 0.0;
    for (int j = 0; j < nlon; ++j) {
      const size_t n = static_cast<size_t>(i) * nlon + j;
      const double y = ens.verification.values[n];
      double m1 = 0.0;
      for (int k = 0; k < ne; ++k) m1 += std::abs(ens.members[k].values[n] - y);
      m1 /= ne;
      double spread = 0.0;
      for (int k = 0; k < ne; ++k)
        for (int l = k + 1; l < ne; ++l)
          spread += std::abs(ens.members[k].values[n] - ens.members[l].values[n]);
      spread *= spread_norm;  // = sum over ordered pairs / (2 Ne (Ne-1))
      acc += paper_sign ? m1 + spread : m1 - spread;
    }
    row_sum[i] = acc;
  }
  double total = 0.0;
  for (int i = 0; i < nlat; ++i) total += row_sum[i] * grid.area_weight(i);
  return total;
}

namespace {

// sum_ij dA (xbar - y)^2 and sum_ij dA sum_k (x_k - xbar)^2 in one pass
void mean_error_and_spread(const EnsembleSet& ens, double& err2, double& spread2) {
  const int ne = static_cast<int>(ens.members.size());
  const Grid& grid = ens.verification.grid;
  const int nlat = grid.nlat, nlon = grid.nlon;
  std::vector<double> row_err(nlat, 0.0), row_spread(nlat, 0.0);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < nlat; ++i) {
    double e = 0.0, s = 0.0;
    for (int j = 0; j < nlon; ++j) {
      const size_t n = static_cast<size_t>(i) * nlon + j;
      double mean = 0.0;
      for (int k = 0; k < ne; ++k) mean += ens.members[k].values[n];
      mean /= ne;
      const double d = mean - ens.verification.values[n];
      e += d * d;
      for (int k = 0; k < ne; ++k) {
        const double dv = ens.members[k].values[n] - mean;
        s += dv * dv;
      }
    }
    row_err[i] = e;
    row_spread[i] = s;
  }
  err2 = 0.0;
  spread2 = 0.0;
  for (int i = 0; i < nlat; ++i) {
    err2 += row_err[i] * grid.area_weight(i);
    spread2 += row_spread[i] * grid.area_weight(i);
  }
}

}  // namespace

double ermse(const EnsembleSet& ens) {
  validate_ensemble(ens);
  double err2, spread2;
  mean_error_and_spread(ens, err2, spread2);
  return std::sqrt(err2);
}

double ser(const EnsembleSet& ens) {
  validate_ensemble(ens);
  const int ne = static_cast<int>(ens.members.size());
  double err2, spread2;
  mean_error_and_spread(ens, err2, spread2);
  if (err2 == 0.0) throw undefined_score_error("spread-error ratio: zero ensemble-mean error");
  return std::sqrt(spread2 / (ne - 1) / err2);
}

UbErmseResult ub_ermse(const EnsembleSet& ens) {
  validate_ensemble(ens);
  const int ne = static_cast<int>(ens.members.size());
  double err2, spread2;
  mean_error_and_spread(ens, err2, spread2);
  const double agg = err2 - spread2 / (static_cast<double>(ne) * (ne - 1));
  if (agg < 0.0) return {0.0, true};
  return {std::sqrt(agg), false};
}

ScoreRow score_ensemble(const EnsembleSet& ens, bool paper_sign) {
  ScoreRow row;
  row.valid_time = ens.valid_time;
  row.lead_hours = ens.lead_hours;
  row.crps = fair_crps(ens, paper_sign);
  row.ermse = ermse(ens);
  row.ser = ser(ens);
  row.ubermse = ub_ermse(ens).value;
  return row;
}

void write_scores_csv(const ScoreSeries& series, std::ostream& out) {
  out << "valid_time,lead_h,crps,ermse,ser,ubermse\n";
  for (const auto& r : series.rows) {
    out << format_time_iso(r.valid_time) << ',' << fmt_full(r.lead_hours) << ','
        << fmt_full(r.crps) << ',' << fmt_full(r.ermse) << ',' << fmt_full(r.ser) << ','
        << fmt_full(r.ubermse) << '\n';
  }
}

ScoreSeries read_scores_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw io_error("cannot open: " + path);
  std::string line;
  if (!std::getline(f, line) || line.rfind("valid_time,lead_h,", 0) != 0)
    throw format_error(path + ": expected score CSV header");
  ScoreSeries s;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string t;
    ScoreRow r;
    if (!std::getline(ss, t, ',')) throw format_error(path + ": bad row");
    r.valid_time = parse_time_iso(t);
    std::string v;
    double* fields[5] = {&r.lead_hours, &r.crps, &r.ermse, &r.ser, &r.ubermse};
    for (double* fp : fields) {
      if (!std::getline(ss, v, ',')) throw format_error(path + ": bad row");
      *fp = std::stod(v);
    }
    s.rows.push_back(r);
  }
  return s;
}

LaggedBuildResult build_lagged_ensembles(const std::string& root, int window, int stride_hours) {
  namespace fs = std::filesystem;
  if (window < 3 || window % 2 == 0)
    throw parameter_error("lagged ensemble window must be odd and >= 3");
  if (stride_hours <= 0) throw parameter_error("stride must be positive");
  if (!fs::is_directory(root)) throw io_error("not a directory: " + root);

  // archive index: init time -> lead hours -> file path
  std::map<TimePoint, std::map<std::int64_t, fs::path>> archive;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (!entry.is_directory()) continue;
    const std::string name = entry.path().filename().string();
    if (name.rfind("init_", 0) != 0) continue;
    const TimePoint init = parse_time_iso(name.substr(5));
    auto& leads = archive[init];
    for (const auto& file : fs::directory_iterator(entry.path())) {
      const std::string fn = file.path().filename().string();
      long long h;
      if (std::sscanf(fn.c_str(), "lead_%lld.sgf", &h) == 1)
        leads[h] = file.path();
    }
  }

  const int half = (window - 1) / 2;
  const std::int64_t stride_s = static_cast<std::int64_t>(stride_hours) * 3600;
  LaggedBuildResult result;
  for (const auto& [tc, leads] : archive) {
    for (const auto& [lc, central_path] : leads) {
      // candidate gate: every window init time must be indexed and every
      // member lead non-negative; failing that, the pair is structurally
      // impossible and does not count as a skip
      bool candidate = true;
      for (int s = -half; s <= half && candidate; ++s) {
        if (lc - static_cast<std::int64_t>(s) * stride_hours < 0) candidate = false;
        if (archive.find(tc + s * stride_s) == archive.end()) candidate = false;
      }
      if (!candidate) continue;

      bool complete = true;
      std::vector<fs::path> member_paths;
      member_paths.reserve(window);
      for (int s = -half; s <= half && complete; ++s) {
        const std::int64_t lead = lc - static_cast<std::int64_t>(s) * stride_hours;
        const auto& member_leads = archive.at(tc + s * stride_s);
        auto lead_it = member_leads.find(lead);
        if (lead_it == member_leads.end())
          complete = false;
        else
          member_paths.push_back(lead_it->second);
      }
      const TimePoint valid = tc + lc * 3600;
      fs::path verif_path;
      if (complete) {
        auto vinit = archive.find(valid);
        if (vinit == archive.end() || vinit->second.find(0) == vinit->second.end())
          complete = false;
        else
          verif_path = vinit->second.at(0);
      }
      if (!complete) {
        ++result.skipped;
        continue;
      }
      EnsembleSet ens;
      ens.valid_time = valid;
      ens.lead_hours = static_cast<double>(lc);
      for (int s = -half; s <= half; ++s)
        ens.member_lag_hours.push_back(static_cast<double>(s) * stride_hours);
      for (const auto& p : member_paths) ens.members.push_back(read_field(p.string()));
      ens.verification = read_field(verif_path.string());
      validate_ensemble(ens);
      result.ensembles.push_back(std::move(ens));
    }
  }
  return result;
}

std::vector<ScoreSignificance> bootstrap_significance(const ScoreSeries& a, const ScoreSeries& b,
                                                      double fraction, int resamples,
                                                      std::uint64_t seed) {
  if (a.rows.size() != b.rows.size() || a.rows.empty())
    throw parameter_error("bootstrap: series must be non-empty and equal-length");
  for (size_t i = 0; i < a.rows.size(); ++i)
    if (a.rows[i].valid_time != b.rows[i].valid_time)
      throw parameter_error("bootstrap: date sets differ");
  if (resamples < 1) throw parameter_error("bootstrap: resamples must be >= 1");
  if (!(fraction > 0.0 && fraction <= 1.0))
    throw parameter_error("bootstrap: fraction must lie in (0,1]");

  const size_t n = a.rows.size();
  const size_t m = std::max<size_t>(1, static_cast<size_t>(std::llround(fraction * n)));
  const char* names[4] = {"crps", "ermse", "ser", "ubermse"};
  auto get = [](const ScoreRow& r, int s) {
    switch (s) {
      case 0: return r.crps;
      case 1: return r.ermse;
      case 2: return r.ser;
      default: return r.ubermse;
    }
  };

  Rng rng(seed);
  std::vector<ScoreSignificance> out;
  for (int s = 0; s < 4; ++s) {
    std::vector<double> diff(n);
    double mean_diff = 0.0;
    for (size_t i = 0; i < n; ++i) {
      diff[i] = get(b.rows[i], s) - get(a.rows[i], s);
      mean_diff += diff[i];
    }
    mean_diff /= n;
    std::vector<double> means(resamples);
    for (int r = 0; r < resamples; ++r) {
      double acc = 0.0;
      for (size_t q = 0; q < m; ++q) acc += diff[rng.below(n)];
      means[r] = acc / m;
    }
    std::sort(means.begin(), means.end());
    auto pct = [&](double p) {
      const double h = p * (resamples - 1);
      const size_t i0 = static_cast<size_t>(h);
      const size_t i1 = std::min<size_t>(i0 + 1, resamples - 1);
      return means[i0] + (h - i0) * (means[i1] - means[i0]);
    };
    ScoreSignificance sig;
    sig.score = names[s];
    sig.mean_diff = mean_diff;
    sig.lo90 = pct(0.05);
    sig.hi90 = pct(0.95);
    sig.significant = (sig.lo90 > 0.0) || (sig.hi90 < 0.0);
    out.push_back(sig);
  }
  return out;
}

}  // namespace spectraloss

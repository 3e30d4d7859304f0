#include "spectraloss/qq.hpp"

#include <algorithm>
#include <cmath>

#include "spectraloss/csvfmt.hpp"
#include "spectraloss/errors.hpp"

namespace spectraloss {

namespace {

double quantile_sorted(const std::vector<double>& sorted, double p) {
  const size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double h = (n - 1) * p;  // 0-based interpolation index
  const size_t i0 = static_cast<size_t>(h);
  const size_t i1 = std::min(i0 + 1, n - 1);
  return sorted[i0] + (h - i0) * (sorted[i1] - sorted[i0]);
}

void check_probs(const std::vector<double>& probabilities) {
  for (double p : probabilities)
    if (!(p > 0.0 && p < 1.0)) throw parameter_error("quantile probability must lie in (0,1)");
}

}  // namespace

std::vector<double> quantiles(const std::vector<double>& sample,
                              const std::vector<double>& probabilities) {
  if (sample.empty()) throw parameter_error("quantiles: empty sample");
  check_probs(probabilities);
  std::vector<double> sorted = sample;
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> out(probabilities.size());
  for (size_t i = 0; i < probabilities.size(); ++i) out[i] = quantile_sorted(sorted, probabilities[i]);
  return out;
}

QQResult qq(const std::vector<double>& x_sample, const std::vector<double>& y_sample,
            const std::vector<double>& probabilities) {
  if (x_sample.empty() || y_sample.empty()) throw parameter_error("qq: empty sample");
  check_probs(probabilities);
  std::vector<double> xs = x_sample;
  std::vector<double> ys = y_sample;
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());

  QQResult r;
  r.percentiles = probabilities;
  r.n_x = xs.size();
  r.n_y = ys.size();
  const double nx = static_cast<double>(r.n_x);
  const double ny = static_cast<double>(r.n_y);
  r.ks_band_halfwidth = 1.358 * std::sqrt((nx + ny) / (nx * ny));

  r.x_quantiles.resize(probabilities.size());
  r.y_quantiles.resize(probabilities.size());
  r.band_low.resize(probabilities.size());
  r.band_high.resize(probabilities.size());
  for (size_t i = 0; i < probabilities.size(); ++i) {
    const double p = probabilities[i];
    r.x_quantiles[i] = quantile_sorted(xs, p);
    r.y_quantiles[i] = quantile_sorted(ys, p);
    const double plo = std::max(p - r.ks_band_halfwidth, 0.0);
    const double phi = std::min(p + r.ks_band_halfwidth, 1.0);
    r.band_low[i] = quantile_sorted(xs, plo);
    r.band_high[i] = quantile_sorted(xs, phi);
  }
  return r;
}

void write_qq_csv(const QQResult& result, std::ostream& out) {
  out << "p,x_quantile,y_quantile,band_low,band_high\n";
  for (size_t i = 0; i < result.percentiles.size(); ++i) {
    out << fmt_full(result.percentiles[i]) << ',' << fmt_full(result.x_quantiles[i]) << ','
        << fmt_full(result.y_quantiles[i]) << ',' << fmt_full(result.band_low[i]) << ','
        << fmt_full(result.band_high[i]) << '\n';
  }
}

}  // namespace spectraloss

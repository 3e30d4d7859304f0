#ifndef SPECTRALOSS_QQ_HPP
#define SPECTRALOSS_QQ_HPP

#include <ostream>
#include <vector>

namespace spectraloss {

/// Linear-interpolation quantiles: order-statistic index h = (n-1)p + 1,
/// interpolated between floor(h) and ceil(h).
std::vector<double> quantiles(const std::vector<double>& sample,
                              const std::vector<double>& probabilities);

/// Matched quantile pairs with a Kolmogorov-Smirnov band.  The halfwidth is
/// c(alpha) sqrt((n_x + n_y) / (n_x n_y)) in probability units at
/// alpha = 0.05 (c = 1.358); band_low/band_high map p -+ halfwidth through
/// the x sample's empirical quantile function into data space.
struct QQResult {
  std::vector<double> percentiles;
  std::vector<double> x_quantiles;
  std::vector<double> y_quantiles;
  std::vector<double> band_low;
  std::vector<double> band_high;
  double ks_band_halfwidth = 0.0;
  size_t n_x = 0;
  size_t n_y = 0;
};

QQResult qq(const std::vector<double>& x_sample, const std::vector<double>& y_sample,
            const std::vector<double>& probabilities);

/// CSV: `p,x_quantile,y_quantile,band_low,band_high`.
void write_qq_csv(const QQResult& result, std::ostream& out);

}  // namespace spectraloss

#endif

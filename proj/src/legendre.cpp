#include "spectraloss/legendre.hpp"

#include <cmath>

#include "spectraloss/errors.hpp"

namespace spectraloss {

std::vector<double> legendre_column(int l, int kmax, double mu) {
  if (l < 0 || kmax < l) throw parameter_error("legendre_column: need 0 <= l <= kmax");
  std::vector<double> out(kmax - l + 1);
  const double s2 = (1.0 - mu) * (1.0 + mu);  // sin^2(lat)
  const double s = std::sqrt(s2 > 0.0 ? s2 : 0.0);

  // sectoral seed Pbar_l^l
  double pll = 1.0;
  for (int m = 1; m <= l; ++m) pll *= s * std::sqrt((2.0 * m + 1.0) / (2.0 * m));
  out[0] = pll;
  if (kmax == l) return out;

  double pm2 = pll;
  double pm1 = std::sqrt(2.0 * l + 3.0) * mu * pll;
  out[1] = pm1;
  double a_prev = std::sqrt((4.0 * (l + 1.0) * (l + 1.0) - 1.0) /
                            ((l + 1.0) * (l + 1.0) - l * l));
  for (int k = l + 2; k <= kmax; ++k) {
    const double kk = static_cast<double>(k);
    const double a = std::sqrt((4.0 * kk * kk - 1.0) / (kk * kk - l * l));
    const double p = a * (mu * pm1 - pm2 / a_prev);
    out[k - l] = p;
    pm2 = pm1;
    pm1 = p;
    a_prev = a;
  }
  return out;
}

LegendreTable::LegendreTable(const std::vector<double>& mu, int kmax)
    : kmax_(kmax), nnodes_(static_cast<int>(mu.size())) {
  values_.resize(kmax + 1);
  for (int l = 0; l <= kmax; ++l)
    values_[l].resize(static_cast<size_t>(kmax - l + 1) * nnodes_);
#pragma omp parallel for schedule(static)
  for (int l = 0; l <= kmax_; ++l) {
    for (int i = 0; i < nnodes_; ++i) {
      const std::vector<double> col = legendre_column(l, kmax_, mu[i]);
      for (int k = l; k <= kmax_; ++k)
        values_[l][static_cast<size_t>(k - l) * nnodes_ + i] = col[k - l];
    }
  }
}

}  // namespace spectraloss

#include "spectraloss/sht_reference.hpp"

#include <cmath>

#include "spectraloss/errors.hpp"
#include "spectraloss/legendre.hpp"

namespace spectraloss {
namespace reference {

SpectralField analyze_direct(const GridField& field, Truncation trunc) {
  check_admissible(field.grid, trunc);
  const Grid& g = field.grid;
  const int K = trunc.K;
  SpectralField spec = make_spectral(K);
  for (int i = 0; i < g.nlat; ++i) {
    const double mu = std::sin(g.latitudes[i]);
    const double qw = g.quad_weights[i];
    const double* row = &field.values[static_cast<size_t>(i) * g.nlon];
    for (int l = 0; l <= K; ++l) {
      // zonal DFT bin l of this row
      double fr = 0.0, fi = 0.0;
      for (int j = 0; j < g.nlon; ++j) {
        const double phi = 2.0 * M_PI * l * j / g.nlon;
        fr += row[j] * std::cos(phi);
        fi -= row[j] * std::sin(phi);
      }
      fr /= g.nlon;
      fi /= g.nlon;
      if (l == 0) fi = 0.0;
      const std::vector<double> col = legendre_column(l, K, mu);
      for (int k = l; k <= K; ++k) {
        const double w = qw * col[k - l];
        spec.coeffs[SpectralField::index(k, l)] += std::complex<double>{w * fr, w * fi};
      }
    }
  }
  return spec;
}

GridField synthesize_direct(const SpectralField& spec, const Grid& grid) {
  check_admissible(grid, spec.trunc);
  const int K = spec.trunc.K;
  GridField field = make_field(grid);
  for (int i = 0; i < grid.nlat; ++i) {
    const double mu = std::sin(grid.latitudes[i]);
    std::vector<std::complex<double>> gl(K + 1, {0.0, 0.0});
    for (int l = 0; l <= K; ++l) {
      const std::vector<double> col = legendre_column(l, K, mu);
      for (int k = l; k <= K; ++k)
        gl[l] += spec.coeffs[SpectralField::index(k, l)] * col[k - l];
    }
    for (int j = 0; j < grid.nlon; ++j) {
      double v = gl[0].real();
      for (int l = 1; l <= K; ++l) {
        const double phi = 2.0 * M_PI * l * j / grid.nlon;
        v += 2.0 * (gl[l].real() * std::cos(phi) - gl[l].imag() * std::sin(phi));
      }
      field.values[static_cast<size_t>(i) * grid.nlon + j] = v;
    }
  }
  return field;
}

}  // namespace reference
}  // namespace spectraloss

#ifndef SPECTRALOSS_SHT_HPP
#define SPECTRALOSS_SHT_HPP

#include <complex>
#include <memory>
#include <vector>

#include "spectraloss/grid.hpp"
#include "spectraloss/legendre.hpp"

namespace spectraloss {

/// Triangular truncation: all modes with total wavenumber k <= K.
struct Truncation {
  int K = 0;
};

/// weight(l) in spectral quadratic sums: l = 0 modes count once, l > 0 modes
/// twice (the conjugate negative-l partner of a real field).
inline double zonal_weight(int l) { return l == 0 ? 1.0 : 2.0; }

inline size_t coeff_count(int K) {
  return static_cast<size_t>(K + 1) * static_cast<size_t>(K + 2) / 2;
}

/// Complex spherical-harmonic coefficients alpha(k,l) for 0 <= l <= k <= K,
/// stored k-major with l ascending.  Im alpha(k,0) = 0 for real fields.
struct SpectralField {
  Truncation trunc;
  std::vector<std::complex<double>> coeffs;

  static size_t index(int k, int l) {
    return static_cast<size_t>(k) * (k + 1) / 2 + l;
  }
  std::complex<double>& at(int k, int l) { return coeffs[index(k, l)]; }
  std::complex<double> at(int k, int l) const { return coeffs[index(k, l)]; }
};

SpectralField make_spectral(int K);

/// Throws parameter_error unless K <= nlat-1 and 2K+1 <= nlon.
void check_admissible(const Grid& grid, Truncation trunc);

/// Forward/inverse spherical-harmonic transform for one (grid, truncation)
/// pair.  Holds the Legendre table and FFT plans; immutable after
/// construction and safe to share across threads.
class SphericalTransform {
 public:
  SphericalTransform(const Grid& grid, Truncation trunc);
  ~SphericalTransform();
  SphericalTransform(const SphericalTransform&) = delete;
  SphericalTransform& operator=(const SphericalTransform&) = delete;

  const Grid& grid() const { return grid_; }
  Truncation trunc() const { return trunc_; }

  SpectralField analyze(const GridField& field) const;
  GridField synthesize(const SpectralField& spec) const;

 private:
  Grid grid_;
  Truncation trunc_;
  LegendreTable table_;
  void* plan_r2c_;  // fftw_plan
  void* plan_c2r_;
};

/// Shared, cached transform for a (grid, truncation) pair.
std::shared_ptr<const SphericalTransform> get_transform(const Grid& grid, Truncation trunc);

SpectralField analyze(const GridField& field, Truncation trunc);
GridField synthesize(const SpectralField& spec, const Grid& grid);

/// Spectral-side MSE: sum_k sum_{l>=0} weight(l) |a - b|^2.
double spectral_mse(const SpectralField& a, const SpectralField& b);

void check_same_trunc(const SpectralField& a, const SpectralField& b);

}  // namespace spectraloss

#endif

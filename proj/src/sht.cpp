#include "spectraloss/sht.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "spectraloss/errors.hpp"

namespace spectraloss {

SpectralField make_spectral(int K) {
  if (K < 0) throw parameter_error("truncation K must be >= 0");
  SpectralField s;
  s.trunc.K = K;
  s.coeffs.assign(coeff_count(K), {0.0, 0.0});
  return s;
}

void check_admissible(const Grid& grid, Truncation trunc) {
  if (trunc.K < 0) throw parameter_error("truncation K must be >= 0");
  if (trunc.K > grid.nlat - 1)
    throw parameter_error("truncation K exceeds nlat-1");
  if (2 * trunc.K + 1 > grid.nlon)
    throw parameter_error("truncation needs 2K+1 <= nlon");
}

void check_same_trunc(const SpectralField& a, const SpectralField& b) {
  if (a.trunc.K != b.trunc.K) throw shape_error("truncations differ");
  if (a.coeffs.size() != coeff_count(a.trunc.K) || b.coeffs.size() != coeff_count(b.trunc.K))
    throw shape_error("coefficient count disagrees with truncation");
}

namespace {

std::vector<double> grid_mu(const Grid& grid) {
  std::vector<double> mu(grid.nlat);
  for (int i = 0; i < grid.nlat; ++i) mu[i] = std::sin(grid.latitudes[i]);
  return mu;
}

// FFTW planning is not reentrant; executes are.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

SphericalTransform::SphericalTransform(const Grid& grid, Truncation trunc)
    : grid_(grid), trunc_(trunc), table_(grid_mu(grid), trunc.K) {
  check_admissible(grid, trunc);
  std::lock_guard<std::mutex> lock(planner_mutex());
  std::vector<double> re(grid.nlon, 0.0);
  std::vector<std::complex<double>> cp(grid.nlon / 2 + 1);
  plan_r2c_ = fftw_plan_dft_r2c_1d(grid.nlon, re.data(),
                                   reinterpret_cast<fftw_complex*>(cp.data()),
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
  plan_c2r_ = fftw_plan_dft_c2r_1d(grid.nlon,
                                   reinterpret_cast<fftw_complex*>(cp.data()),
                                   re.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
}

SphericalTransform::~SphericalTransform() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_r2c_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_c2r_));
}

SpectralField SphericalTransform::analyze(const GridField& field) const {
  if (!field.grid.same_layout(grid_)) throw shape_error("field grid does not match transform");
  const int nlat = grid_.nlat, nlon = grid_.nlon, K = trunc_.K;
  const int nbins = nlon / 2 + 1;

  // zonal Fourier coefficients f_l(i) = (1/nlon) sum_j x(i,j) exp(-i l phi_j),
  // stored contiguously over latitude for the projection stage
  std::vector<std::complex<double>> four(static_cast<size_t>(K + 1) * nlat);
#pragma omp parallel
  {
    std::vector<double> in(nlon);
    std::vector<std::complex<double>> out(nbins);
#pragma omp for schedule(static)
    for (int i = 0; i < nlat; ++i) {
      for (int j = 0; j < nlon; ++j) in[j] = field.values[static_cast<size_t>(i) * nlon + j];
      fftw_execute_dft_r2c(static_cast<fftw_plan>(plan_r2c_), in.data(),
                           reinterpret_cast<fftw_complex*>(out.data()));
      const double inv = 1.0 / nlon;
      for (int l = 0; l <= K; ++l)
        four[static_cast<size_t>(l) * nlat + i] = out[l] * inv;
      four[i].imag(0.0);  // l = 0 bin of a real row is exactly real
    }
  }

  SpectralField spec = make_spectral(K);
#pragma omp parallel for schedule(static)
  for (int l = 0; l <= K; ++l) {
    const std::complex<double>* fl = &four[static_cast<size_t>(l) * nlat];
    for (int k = l; k <= K; ++k) {
      const double* p = table_.row(k, l);
      double re = 0.0, im = 0.0;
      for (int i = 0; i < nlat; ++i) {
        const double w = grid_.quad_weights[i] * p[i];
        re += w * fl[i].real();
        im += w * fl[i].imag();
      }
      spec.coeffs[SpectralField::index(k, l)] = {re, im};
    }
  }
  return spec;
}

GridField SphericalTransform::synthesize(const SpectralField& spec) const {
  if (spec.trunc.K != trunc_.K) throw shape_error("spectral truncation does not match transform");
  const int nlat = grid_.nlat, nlon = grid_.nlon, K = trunc_.K;
  const int nbins = nlon / 2 + 1;

  // per-latitude zonal coefficients g_l(i) = sum_{k>=l} alpha(k,l) Pbar_k^l(mu_i)
  std::vector<std::complex<double>> gl(static_cast<size_t>(K + 1) * nlat, {0.0, 0.0});
#pragma omp parallel for schedule(static)
  for (int l = 0; l <= K; ++l) {
    std::complex<double>* out = &gl[static_cast<size_t>(l) * nlat];
    for (int k = l; k <= K; ++k) {
      const std::complex<double> a = spec.coeffs[SpectralField::index(k, l)];
      const double* p = table_.row(k, l);
      for (int i = 0; i < nlat; ++i) out[i] += a * p[i];
    }
  }

  GridField field = make_field(grid_);
#pragma omp parallel
  {
    std::vector<std::complex<double>> bins(nbins);
    std::vector<double> row(nlon);
#pragma omp for schedule(static)
    for (int i = 0; i < nlat; ++i) {
      for (int l = 0; l < nbins; ++l)
        bins[l] = (l <= K) ? gl[static_cast<size_t>(l) * nlat + i]
                           : std::complex<double>{0.0, 0.0};
      fftw_execute_dft_c2r(static_cast<fftw_plan>(plan_c2r_),
                           reinterpret_cast<fftw_complex*>(bins.data()), row.data());
      for (int j = 0; j < nlon; ++j) field.values[static_cast<size_t>(i) * nlon + j] = row[j];
    }
  }
  return field;
}

std::shared_ptr<const SphericalTransform> get_transform(const Grid& grid, Truncation trunc) {
  using Key = std::tuple<int, int, int, int>;
  static std::map<Key, std::shared_ptr<const SphericalTransform>> cache;
  static std::mutex mutex;
  const Key key{grid.nlat, grid.nlon, static_cast<int>(grid.kind), trunc.K};
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto t = std::make_shared<const SphericalTransform>(grid, trunc);
  cache.emplace(key, t);
  return t;
}

SpectralField analyze(const GridField& field, Truncation trunc) {
  return get_transform(field.grid, trunc)->analyze(field);
}

GridField synthesize(const SpectralField& spec, const Grid& grid) {
  return get_transform(grid, spec.trunc)->synthesize(spec);
}

double spectral_mse(const SpectralField& a, const SpectralField& b) {
  check_same_trunc(a, b);
  const int K = a.trunc.K;
  double total = 0.0;
  for (int k = 0; k <= K; ++k) {
    double shell = 0.0;
    for (int l = 0; l <= k; ++l) {
      const std::complex<double> d =
          a.coeffs[SpectralField::index(k, l)] - b.coeffs[SpectralField::index(k, l)];
      shell += zonal_weight(l) * std::norm(d);
    }
    total += shell;
  }
  return total;
}

}  // namespace spectraloss

#ifndef SPECTRALOSS_TEST_HELPERS_HPP
#define SPECTRALOSS_TEST_HELPERS_HPP

#include <cmath>
#include <cstdint>
#include <utility>

#include "spectraloss/grid.hpp"
#include "spectraloss/rng.hpp"
#include "spectraloss/sht.hpp"
#include "spectraloss/toy_train.hpp"

namespace testutil {

using namespace spectraloss;

/// Independent spatial quadrature sum, written out long-hand as the oracle
/// for the spectral-side identities.
inline double spatial_mse_oracle(const GridField& x, const GridField& y) {
  double acc = 0.0;
  for (int i = 0; i < x.grid.nlat; ++i) {
    for (int j = 0; j < x.grid.nlon; ++j) {
      const double d = x.at(i, j) - y.at(i, j);
      acc += x.grid.quad_weights[i] / x.grid.nlon * d * d;
    }
  }
  return acc;
}

inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

/// Random band-limited spectral pair with per-shell correlation rho.
inline std::pair<SpectralField, SpectralField> random_spectral_pair(int K, double rho,
                                                                    std::uint64_t seed,
                                                                    double slope = 1.0) {
  SyntheticSpec spec;
  spec.K = K;
  spec.slope = slope;
  spec.rho = rho_profile_const(K, rho);
  spec.seed = seed;
  return sample_pair(spec);
}

inline GridField random_bandlimited_field(const Grid& grid, int K, std::uint64_t seed,
                                          double slope = 1.0) {
  auto [input, target] = random_spectral_pair(K, 1.0, seed, slope);
  return synthesize(target, grid);
}

}  // namespace testutil

#endif

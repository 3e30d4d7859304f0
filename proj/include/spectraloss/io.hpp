#ifndef SPECTRALOSS_IO_HPP
#define SPECTRALOSS_IO_HPP

#include <string>

#include "spectraloss/grid.hpp"
#include "spectraloss/sht.hpp"

namespace spectraloss {

/// Binary field format SGF1 (little-endian):
///   bytes 0-3   ASCII "SGF1"
///   bytes 4-7   u32 nlat
///   bytes 8-11  u32 nlon
///   byte  12    grid kind (0 = gaussian, 1 = equiangular)
///   bytes 13-19 zero padding
///   then nlat*nlon float64 values, latitude-major.
void write_field_sgf(const GridField& field, const std::string& path);
GridField read_field_sgf(const std::string& path);

/// CSV alternative: header row `lat,lon,value`, one row per point, latitudes
/// and longitudes in radians, values printed with 17 significant digits.
void write_field_csv(const GridField& field, const std::string& path);
GridField read_field_csv(const std::string& path);

/// Dispatch on extension: ".csv" uses the CSV form, anything else SGF1.
void write_field(const GridField& field, const std::string& path);
GridField read_field(const std::string& path);

/// Spectral file SCF1 (little-endian): ASCII "SCF1", u32 K, then
/// (K+1)(K+2)/2 coefficients as interleaved (re, im) float64 in the frozen
/// k-major, l-ascending order.
void write_spectral(const SpectralField& spec, const std::string& path);
SpectralField read_spectral(const std::string& path);

}  // namespace spectraloss

#endif

#include "spectraloss/io.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "spectraloss/csvfmt.hpp"
#include "spectraloss/errors.hpp"

namespace spectraloss {

namespace {

void store_u32le(std::uint32_t v, unsigned char* p) {
  p[0] = v & 0xff;
  p[1] = (v >> 8) & 0xff;
  p[2] = (v >> 16) & 0xff;
  p[3] = (v >> 24) & 0xff;
}

std::uint32_t load_u32le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void store_f64le(double v, unsigned char* p) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  for (int i = 0; i < 8; ++i) p[i] = (bits >> (8 * i)) & 0xff;
}

double load_f64le(const unsigned char* p) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

std::ofstream open_out(const std::string& path, bool binary) {
  std::ofstream f(path, binary ? std::ios::binary | std::ios::out : std::ios::out);
  if (!f) throw io_error("cannot open for writing: " + path);
  return f;
}

std::ifstream open_in(const std::string& path, bool binary) {
  std::ifstream f(path, binary ? std::ios::binary | std::ios::in : std::ios::in);
  if (!f) throw io_error("cannot open: " + path);
  return f;
}

Grid rebuild_grid(std::uint32_t nlat, std::uint32_t nlon, int kind, const std::string& path) {
  if (nlat < 2 || nlon < 4 || nlon % 2 != 0 || nlat > (1u << 20) || nlon > (1u << 20))
    throw format_error(path + ": invalid grid dimensions in header");
  if (kind == 0) return make_gaussian_grid(static_cast<int>(nlat), static_cast<int>(nlon));
  if (kind == 1) return make_equiangular_grid(static_cast<int>(nlat), static_cast<int>(nlon));
  throw format_error(path + ": unknown grid kind byte at offset 12");
}

void check_payload_finite(const std::vector<double>& values, size_t payload_offset,
                          const std::string& path) {
  for (size_t n = 0; n < values.size(); ++n) {
    if (!std::isfinite(values[n])) {
      std::ostringstream msg;
      msg << path << ": non-finite value at byte offset " << (payload_offset + 8 * n);
      throw format_error(msg.str());
    }
  }
}

}  // namespace

void write_field_sgf(const GridField& field, const std::string& path) {
  for (double v : field.values)
    if (!std::isfinite(v)) throw format_error("refusing to write non-finite field value");
  std::ofstream f = open_out(path, true);
  unsigned char header[20] = {'S', 'G', 'F', '1'};
  store_u32le(static_cast<std::uint32_t>(field.grid.nlat), header + 4);
  store_u32le(static_cast<std::uint32_t>(field.grid.nlon), header + 8);
  header[12] = static_cast<unsigned char>(field.grid.kind);
  f.write(reinterpret_cast<const char*>(header), sizeof header);
  std::vector<unsigned char> buf(field.values.size() * 8);
  for (size_t n = 0; n < field.values.size(); ++n) store_f64le(field.values[n], &buf[8 * n]);
  f.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!f) throw io_error("write failed: " + path);
}

GridField read_field_sgf(const std::string& path) {
  std::ifstream f = open_in(path, true);
  unsigned char header[20];
  f.read(reinterpret_cast<char*>(header), sizeof header);
  if (f.gcount() < 4 || std::memcmp(header, "SGF1", 4) != 0)
    throw format_error(path + ": bad magic at byte offset 0");
  if (f.gcount() < static_cast<std::streamsize>(sizeof header))
    throw format_error(path + ": truncated header at byte offset " + std::to_string(f.gcount()));
  const std::uint32_t nlat = load_u32le(header + 4);
  const std::uint32_t nlon = load_u32le(header + 8);
  GridField field;
  field.grid = rebuild_grid(nlat, nlon, header[12], path);
  const size_t count = static_cast<size_t>(nlat) * nlon;
  std::vector<unsigned char> buf(count * 8);
  f.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (static_cast<size_t>(f.gcount()) != buf.size()) {
    std::ostringstream msg;
    msg << path << ": truncated payload, expected " << count << " values, file ends at byte offset "
        << (sizeof header + f.gcount());
    throw format_error(msg.str());
  }
  field.values.resize(count);
  for (size_t n = 0; n < count; ++n) field.values[n] = load_f64le(&buf[8 * n]);
  check_payload_finite(field.values, sizeof header, path);
  return field;
}

void write_field_csv(const GridField& field, const std::string& path) {
  for (double v : field.values)
    if (!std::isfinite(v)) throw format_error("refusing to write non-finite field value");
  std::ofstream f = open_out(path, false);
  f << "lat,lon,value\n";
  for (int i = 0; i < field.grid.nlat; ++i) {
    const std::string lat = fmt_full(field.grid.latitudes[i]);
    for (int j = 0; j < field.grid.nlon; ++j) {
      const double lon = 2.0 * M_PI * j / field.grid.nlon;
      f << lat << ',' << fmt_full(lon) << ',' << fmt_full(field.at(i, j)) << '\n';
    }
  }
  if (!f) throw io_error("write failed: " + path);
}

GridField read_field_csv(const std::string& path) {
  std::ifstream f = open_in(path, false);
  std::string line;
  if (!std::getline(f, line) || line.rfind("lat,lon,value", 0) != 0)
    throw format_error(path + ": expected header row lat,lon,value");
  std::vector<double> lats, values;
  std::vector<double> row_lats;
  size_t nrows = 0;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    double lat, lon, value;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &lat, &lon, &value) != 3)
      throw format_error(path + ": bad CSV row " + std::to_string(nrows + 2));
    row_lats.push_back(lat);
    values.push_back(value);
    ++nrows;
  }
  if (nrows == 0) throw format_error(path + ": no data rows");
  // latitude runs determine nlat/nlon
  lats.push_back(row_lats[0]);
  for (size_t n = 1; n < nrows; ++n)
    if (row_lats[n] != lats.back()) lats.push_back(row_lats[n]);
  const size_t nlat = lats.size();
  if (nrows % nlat != 0) throw format_error(path + ": ragged rows, not a full grid");
  const size_t nlon = nrows / nlat;
  for (size_t n = 0; n < nrows; ++n)
    if (row_lats[n] != lats[n / nlon])
      throw format_error(path + ": rows are not latitude-major");
  for (size_t i = 1; i < nlat; ++i)
    if (!(lats[i] < lats[i - 1]))
      throw format_error(path + ": latitudes must decrease north to south");

  GridField field;
  Grid gauss = make_gaussian_grid(static_cast<int>(nlat), static_cast<int>(nlon));
  bool is_gauss = true;
  for (size_t i = 0; i < nlat; ++i)
    if (std::abs(gauss.latitudes[i] - lats[i]) > 1e-9) is_gauss = false;
  if (is_gauss) {
    field.grid = gauss;
  } else {
    Grid eq = make_equiangular_grid(static_cast<int>(nlat), static_cast<int>(nlon));
    for (size_t i = 0; i < nlat; ++i)
      if (std::abs(eq.latitudes[i] - lats[i]) > 1e-9)
        throw format_error(path + ": latitudes match neither gaussian nor equiangular nodes");
    field.grid = eq;
  }
  field.values = std::move(values);
  check_payload_finite(field.values, 0, path);
  return field;
}

void write_field(const GridField& field, const std::string& path) {
  if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0)
    write_field_csv(field, path);
  else
    write_field_sgf(field, path);
}

GridField read_field(const std::string& path) {
  if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0)
    return read_field_csv(path);
  return read_field_sgf(path);
}

void write_spectral(const SpectralField& spec, const std::string& path) {
  std::ofstream f = open_out(path, true);
  unsigned char header[8] = {'S', 'C', 'F', '1'};
  store_u32le(static_cast<std::uint32_t>(spec.trunc.K), header + 4);
  f.write(reinterpret_cast<const char*>(header), sizeof header);
  std::vector<unsigned char> buf(spec.coeffs.size() * 16);
  for (size_t n = 0; n < spec.coeffs.size(); ++n) {
    store_f64le(spec.coeffs[n].real(), &buf[16 * n]);
    store_f64le(spec.coeffs[n].imag(), &buf[16 * n + 8]);
  }
  f.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!f) throw io_error("write failed: " + path);
}

SpectralField read_spectral(const std::string& path) {
  std::ifstream f = open_in(path, true);
  unsigned char header[8];
  f.read(reinterpret_cast<char*>(header), sizeof header);
  if (f.gcount() < 4 || std::memcmp(header, "SCF1", 4) != 0)
    throw format_error(path + ": bad magic at byte offset 0");
  if (f.gcount() < static_cast<std::streamsize>(sizeof header))
    throw format_error(path + ": truncated header at byte offset " + std::to_string(f.gcount()));
  const std::uint32_t K = load_u32le(header + 4);
  if (K > (1u << 16)) throw format_error(path + ": implausible truncation in header");
  SpectralField spec = make_spectral(static_cast<int>(K));
  std::vector<unsigned char> buf(spec.coeffs.size() * 16);
  f.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (static_cast<size_t>(f.gcount()) != buf.size()) {
    std::ostringstream msg;
    msg << path << ": truncated payload, file ends at byte offset " << (sizeof header + f.gcount());
    throw format_error(msg.str());
  }
  for (size_t n = 0; n < spec.coeffs.size(); ++n) {
    const double re = load_f64le(&buf[16 * n]);
    const double im = load_f64le(&buf[16 * n + 8]);
    if (!std::isfinite(re) || !std::isfinite(im)) {
      std::ostringstream msg;
      msg << path << ": non-finite coefficient at byte offset " << (sizeof header + 16 * n);
      throw format_error(msg.str());
    }
    spec.coeffs[n] = {re, im};
  }
  return spec;
}

}  // namespace spectraloss

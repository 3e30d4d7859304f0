#include <doctest.h>

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "helpers.hpp"
#include "spectraloss/errors.hpp"
#include "spectraloss/grid.hpp"
#include "spectraloss/io.hpp"

using namespace spectraloss;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const char* name) {
  return fs::temp_directory_path() / (std::string("spectraloss_test_") + name);
}

std::uint64_t bits_of(double v) {
  std::uint64_t b;
  std::memcpy(&b, &v, 8);
  return b;
}

}  // namespace

TEST_CASE("two-point Gauss-Legendre grid") {
  const Grid g = make_gaussian_grid(2, 4);
  const double node = 1.0 / std::sqrt(3.0);
  CHECK(g.latitudes[0] == doctest::Approx(std::asin(node)).epsilon(1e-15));
  CHECK(g.latitudes[1] == doctest::Approx(-std::asin(node)).epsilon(1e-15));
  CHECK(g.quad_weights[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(g.quad_weights[1] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("64x128 grid symmetry and normalization") {
  const Grid g = make_gaussian_grid(64, 128);
  double sum_da = 0.0;
  for (int i = 0; i < 64; ++i) {
    CHECK(g.latitudes[i] == doctest::Approx(-g.latitudes[63 - i]).epsilon(1e-14));
    if (i > 0) CHECK(g.latitudes[i] < g.latitudes[i - 1]);
    sum_da += g.quad_weights[i];
  }
  CHECK(std::abs(sum_da - 1.0) <= 1e-14);
}

TEST_CASE("quadrature integrates sin^2(lat) to 1/3") {
  const Grid g = make_gaussian_grid(64, 128);
  double acc = 0.0;
  for (int i = 0; i < g.nlat; ++i) {
    const double mu = std::sin(g.latitudes[i]);
    acc += g.quad_weights[i] * mu * mu;
  }
  CHECK(std::abs(acc - 1.0 / 3.0) <= 1e-14);
}

TEST_CASE("quadrature exactness for polynomials up to degree 2n-1") {
  const int nlat = 16;
  const Grid g = make_gaussian_grid(nlat, 32);
  for (int d = 0; d <= 2 * nlat - 1; ++d) {
    double acc = 0.0;
    for (int i = 0; i < nlat; ++i) acc += g.quad_weights[i] * std::pow(std::sin(g.latitudes[i]), d);
    const double exact = (d % 2 == 0) ? 1.0 / (d + 1) : 0.0;  // integral of mu^d dmu/2
    CHECK(std::abs(acc - exact) <= 1e-12);
  }
}

TEST_CASE("invalid grid dimensions") {
  CHECK_THROWS_AS(make_gaussian_grid(1, 8), parameter_error);
  CHECK_THROWS_AS(make_gaussian_grid(8, 7), parameter_error);
  CHECK_THROWS_AS(make_gaussian_grid(8, 2), parameter_error);
}

TEST_CASE("area mean square error basics") {
  const Grid g = make_gaussian_grid(8, 16);
  GridField x = make_field(g, 1.0);
  GridField y = make_field(g, 0.0);
  CHECK(area_mean_square_error(x, x) == 0.0);
  CHECK(area_mean_square_error(x, y) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(area_mean_absolute_error(x, y) == doctest::Approx(1.0).epsilon(1e-14));

  const Grid g2 = make_gaussian_grid(8, 18);
  GridField z = make_field(g2);
  CHECK_THROWS_AS(area_mean_square_error(x, z), shape_error);
}

TEST_CASE("equiangular grid accepted with inexact quadrature flag") {
  const Grid g = make_equiangular_grid(32, 64);
  CHECK_FALSE(g.exact_quadrature());
  double sum = 0.0;
  for (double w : g.quad_weights) sum += w;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(g.latitudes.front() > 0.0);
  CHECK(g.latitudes.back() < 0.0);
}

TEST_CASE("SGF1 round trip is bit-exact including extreme finite values") {
  const Grid g = make_gaussian_grid(4, 8);
  GridField f = make_field(g);
  Rng rng(99);
  for (auto& v : f.values) v = (rng.uniform() - 0.5) * std::pow(10.0, 300.0 * (rng.uniform() - 0.5));
  f.values[0] = 5e-324;           // smallest denormal
  f.values[1] = 1.7976931348623157e308;
  f.values[2] = -0.0;
  f.values[3] = 0.0;

  const fs::path p = temp_file("roundtrip.sgf");
  write_field_sgf(f, p.string());
  const GridField r = read_field_sgf(p.string());
  REQUIRE(r.values.size() == f.values.size());
  for (size_t n = 0; n < f.values.size(); ++n) CHECK(bits_of(r.values[n]) == bits_of(f.values[n]));
  CHECK(r.grid.kind == GridKind::gaussian);
  fs::remove(p);
}

TEST_CASE("CSV round trip recovers exact values and grid kind") {
  const Grid g = make_equiangular_grid(4, 8);
  GridField f = make_field(g);
  Rng rng(3);
  for (auto& v : f.values) v = rng.gaussian() * 1e-7;
  const fs::path p = temp_file("roundtrip.csv");
  write_field(f, p.string());  // dispatches on extension
  const GridField r = read_field(p.string());
  CHECK(r.grid.kind == GridKind::equiangular);
  REQUIRE(r.values.size() == f.values.size());
  for (size_t n = 0; n < f.values.size(); ++n) CHECK(bits_of(r.values[n]) == bits_of(f.values[n]));
  fs::remove(p);
}

TEST_CASE("bad magic names byte offset 0") {
  const fs::path p = temp_file("badmagic.sgf");
  std::ofstream(p) << "XXXXgarbage";
  try {
    read_field_sgf(p.string());
    FAIL("expected format_error");
  } catch (const format_error& e) {
    CHECK(std::string(e.what()).find("offset 0") != std::string::npos);
  }
  fs::remove(p);
}

TEST_CASE("truncated payload detected") {
  // header claims 64x128 but only 100 values follow
  const Grid g = make_gaussian_grid(64, 128);
  GridField f = make_field(g, 1.5);
  const fs::path full = temp_file("full.sgf");
  write_field_sgf(f, full.string());
  std::ifstream in(full, std::ios::binary);
  std::vector<char> bytes(20 + 100 * 8);
  in.read(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  const fs::path p = temp_file("short.sgf");
  std::ofstream(p, std::ios::binary).write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  try {
    read_field_sgf(p.string());
    FAIL("expected format_error");
  } catch (const format_error& e) {
    CHECK(std::string(e.what()).find("truncated") != std::string::npos);
  }
  fs::remove(full);
  fs::remove(p);
}

TEST_CASE("NaN payload rejected with byte offset") {
  const Grid g = make_gaussian_grid(2, 4);
  GridField f = make_field(g, 1.0);
  const fs::path p = temp_file("nan.sgf");
  write_field_sgf(f, p.string());
  // patch value 3 (offset 20 + 3*8) to a quiet NaN
  std::fstream fix(p, std::ios::in | std::ios::out | std::ios::binary);
  fix.seekp(20 + 3 * 8);
  const unsigned char nan_bytes[8] = {0, 0, 0, 0, 0, 0, 0xf8, 0x7f};
  fix.write(reinterpret_cast<const char*>(nan_bytes), 8);
  fix.close();
  try {
    read_field_sgf(p.string());
    FAIL("expected format_error");
  } catch (const format_error& e) {
    CHECK(std::string(e.what()).find(std::to_string(20 + 3 * 8)) != std::string::npos);
  }
  fs::remove(p);

  GridField bad = make_field(g, 0.0);
  bad.values[1] = std::nan("");
  CHECK_THROWS_AS(write_field_sgf(bad, p.string()), format_error);
}

TEST_CASE("SCF1 round trip and errors") {
  SpectralField s = make_spectral(5);
  Rng rng(11);
  for (auto& c : s.coeffs) c = {rng.gaussian(), rng.gaussian()};
  for (int k = 0; k <= 5; ++k) s.at(k, 0).imag(0.0);
  const fs::path p = temp_file("spec.scf");
  write_spectral(s, p.string());
  const SpectralField r = read_spectral(p.string());
  CHECK(r.trunc.K == 5);
  for (size_t n = 0; n < s.coeffs.size(); ++n) {
    CHECK(bits_of(r.coeffs[n].real()) == bits_of(s.coeffs[n].real()));
    CHECK(bits_of(r.coeffs[n].imag()) == bits_of(s.coeffs[n].imag()));
  }
  std::ofstream(p, std::ios::binary) << "SCF1\x02\x00\x00\x00re";
  CHECK_THROWS_AS(read_spectral(p.string()), format_error);
  std::ofstream(p, std::ios::binary) << "NOPE";
  CHECK_THROWS_AS(read_spectral(p.string()), format_error);
  fs::remove(p);
}

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "helpers.hpp"
#include "spectraloss/errors.hpp"
#include "spectraloss/qq.hpp"

using namespace spectraloss;

TEST_CASE("linear-interpolation quantiles") {
  std::vector<double> sample(100);
  for (int i = 0; i < 100; ++i) sample[i] = i + 1;  // {1..100}
  std::reverse(sample.begin(), sample.begin() + 50);  // order must not matter
  const auto q = quantiles(sample, {0.5, 0.98, 0.01});
  CHECK(q[0] == doctest::Approx(50.5).epsilon(1e-14));
  CHECK(q[1] == doctest::Approx(98.02).epsilon(1e-12));
  CHECK(q[2] == doctest::Approx(1.99).epsilon(1e-12));

  CHECK(quantiles({42.0}, {0.1})[0] == 42.0);
  CHECK(quantiles({42.0}, {0.9})[0] == 42.0);
  CHECK_THROWS_AS(quantiles({}, {0.5}), parameter_error);
  CHECK_THROWS_AS(quantiles({1.0}, {0.0}), parameter_error);
  CHECK_THROWS_AS(quantiles({1.0}, {1.0}), parameter_error);
}

TEST_CASE("quantiles are monotone in p and affine-equivariant") {
  Rng rng(3);
  std::vector<double> sample(500);
  for (auto& v : sample) v = rng.gaussian();
  std::vector<double> probs;
  for (double p = 0.02; p < 0.99; p += 0.02) probs.push_back(p);
  const auto q = quantiles(sample, probs);
  for (size_t i = 1; i < q.size(); ++i) CHECK(q[i] >= q[i - 1]);

  std::vector<double> mapped = sample;
  for (auto& v : mapped) v = 2.5 * v - 1.0;
  const auto qm = quantiles(mapped, probs);
  for (size_t i = 0; i < q.size(); ++i)
    CHECK(qm[i] == doctest::Approx(2.5 * q[i] - 1.0).epsilon(1e-12));
}

TEST_CASE("qq of a sample with itself lies on the diagonal") {
  Rng rng(5);
  std::vector<double> sample(1000);
  for (auto& v : sample) v = rng.gaussian();
  const QQResult r = qq(sample, sample, {0.05, 0.25, 0.5, 0.75, 0.95});
  for (size_t i = 0; i < r.percentiles.size(); ++i)
    CHECK(r.x_quantiles[i] == r.y_quantiles[i]);
}

TEST_CASE("qq shift equivariance") {
  Rng rng(7);
  std::vector<double> x(800), y;
  for (auto& v : x) v = rng.gaussian();
  y = x;
  for (auto& v : y) v += 1.0;
  const QQResult r = qq(x, y, {0.1, 0.5, 0.9});
  for (size_t i = 0; i < r.percentiles.size(); ++i)
    CHECK(r.y_quantiles[i] == doctest::Approx(r.x_quantiles[i] + 1.0).epsilon(1e-12));
}

TEST_CASE("KS band halfwidth shrinks like 1/sqrt(n)") {
  std::vector<double> a(100, 0.0), b(400, 0.0);
  a[0] = b[0] = 1.0;
  const double h1 = qq(a, a, {0.5}).ks_band_halfwidth;
  const double h2 = qq(b, b, {0.5}).ks_band_halfwidth;
  CHECK(h1 == doctest::Approx(1.358 * std::sqrt(2.0 / 100.0)).epsilon(1e-12));
  CHECK(h2 == doctest::Approx(h1 / 2.0).epsilon(1e-12));
}

TEST_CASE("KS band calibration against same-distribution samples") {
  // two N(0,1) samples of 1e4: the two-sample KS statistic stays inside the
  // alpha = 0.05 band in at least 95 of 100 seeded trials, and the banded
  // quantile intervals contain the y quantiles in those trials
  const int n = 10000;
  std::vector<double> probs;
  for (double p = 0.05; p <= 0.951; p += 0.05) probs.push_back(p);
  int ks_inside = 0;
  int band_inside = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Rng rng(1000 + trial);
    std::vector<double> x(n), y(n);
    for (auto& v : x) v = rng.gaussian();
    for (auto& v : y) v = rng.gaussian();
    const QQResult r = qq(x, y, probs);

    // direct two-sample KS statistic
    std::vector<double> xs = x, ys = y;
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    double d = 0.0;
    size_t i = 0, j = 0;
    while (i < xs.size() && j < ys.size()) {
      if (xs[i] <= ys[j])
        ++i;
      else
        ++j;
      d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / n));
    }
    if (d <= r.ks_band_halfwidth) ++ks_inside;

    bool contained = true;
    for (size_t m = 0; m < probs.size(); ++m)
      if (r.y_quantiles[m] < r.band_low[m] || r.y_quantiles[m] > r.band_high[m]) contained = false;
    if (contained) ++band_inside;
  }
  CHECK(ks_inside >= 95);
  CHECK(band_inside >= 95);
}

TEST_CASE("qq CSV emission") {
  std::vector<double> x{1, 2, 3, 4, 5}, y{2, 3, 4, 5, 6};
  const QQResult r = qq(x, y, {0.25, 0.5});
  std::ostringstream out;
  write_qq_csv(r, out);
  const std::string s = out.str();
  CHECK(s.rfind("p,x_quantile,y_quantile,band_low,band_high\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 3);
}

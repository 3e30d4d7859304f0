#include "spectraloss/grid.hpp"

#include <cmath>
#include <cstdio>

#include "spectraloss/errors.hpp"

namespace spectraloss {

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw parameter_error("gauss_legendre: n must be >= 1");
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Tricomi initial guess, then Newton on P_n(x).
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) {
        // one polishing step after convergence
        p0 = 1.0;
        p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        x -= p1 / dp;
        break;
      }
    }
    // store descending in x (north to south)
    nodes[i] = x;
    nodes[n - 1 - i] = -x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) nodes[n / 2] = 0.0;
}

static void check_dims(int nlat, int nlon) {
  if (nlat < 2) throw parameter_error("grid: nlat must be >= 2");
  if (nlon < 4 || nlon % 2 != 0) throw parameter_error("grid: nlon must be even and >= 4");
}

Grid make_gaussian_grid(int nlat, int nlon) {
  check_dims(nlat, nlon);
  Grid g;
  g.nlat = nlat;
  g.nlon = nlon;
  g.kind = GridKind::gaussian;
  std::vector<double> x, w;
  gauss_legendre(nlat, x, w);
  g.latitudes.resize(nlat);
  g.quad_weights.resize(nlat);
  for (int i = 0; i < nlat; ++i) {
    g.latitudes[i] = std::asin(x[i]);
    g.quad_weights[i] = 0.5 * w[i];  // GL weights sum to 2; normalize to 1
  }
  return g;
}

Grid make_equiangular_grid(int nlat, int nlon) {
  check_dims(nlat, nlon);
  Grid g;
  g.nlat = nlat;
  g.nlon = nlon;
  g.kind = GridKind::equiangular;
  g.latitudes.resize(nlat);
  g.quad_weights.resize(nlat);
  double wsum = 0.0;
  for (int i = 0; i < nlat; ++i) {
    // cell centers, poles excluded
    g.latitudes[i] = M_PI_2 - (i + 0.5) * M_PI / nlat;
    g.quad_weights[i] = std::cos(g.latitudes[i]);
    wsum += g.quad_weights[i];
  }
  for (auto& w : g.quad_weights) w /= wsum;
  return g;
}

GridField make_field(const Grid& grid, double fill) {
  GridField f;
  f.grid = grid;
  f.values.assign(static_cast<size_t>(grid.nlat) * grid.nlon, fill);
  return f;
}

void check_same_grid(const GridField& x, const GridField& y) {
  if (!x.grid.same_layout(y.grid))
    throw shape_error("fields are on different grids");
  if (x.values.size() != y.values.size())
    throw shape_error("field sizes disagree with grids");
}

double area_mean_square_error(const GridField& x, const GridField& y) {
  check_same_grid(x, y);
  const int nlat = x.grid.nlat, nlon = x.grid.nlon;
  double total = 0.0;
  for (int i = 0; i < nlat; ++i) {
    double row = 0.0;
    const double* xv = &x.values[static_cast<size_t>(i) * nlon];
    const double* yv = &y.values[static_cast<size_t>(i) * nlon];
    for (int j = 0; j < nlon; ++j) {
      const double d = xv[j] - yv[j];
      row += d * d;
    }
    total += row * x.grid.area_weight(i);
  }
  return total;
}

double area_mean_absolute_error(const GridField& x, const GridField& y) {
  check_same_grid(x, y);
  const int nlat = x.grid.nlat, nlon = x.grid.nlon;
  double total = 0.0;
  for (int i = 0; i < nlat; ++i) {
    double row = 0.0;
    const double* xv = &x.values[static_cast<size_t>(i) * nlon];
    const double* yv = &y.values[static_cast<size_t>(i) * nlon];
    for (int j = 0; j < nlon; ++j) row += std::abs(xv[j] - yv[j]);
    total += row * x.grid.area_weight(i);
  }
  return total;
}

}  // namespace spectraloss

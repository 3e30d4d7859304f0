#ifndef SPECTRALOSS_GRID_HPP
#define SPECTRALOSS_GRID_HPP

#include <optional>
#include <string>
#include <vector>

namespace spectraloss {

enum class GridKind : int { gaussian = 0, equiangular = 1 };

/// Latitude/longitude grid with quadrature weights.  Latitudes run north to
/// south (strictly decreasing); longitudes start at 0 and increase eastward
/// with period 2*pi.  Row weights are normalized so that the area weight
/// dA(i,j) = quad_weights[i] / nlon sums to exactly 1 over the grid.
struct Grid {
  int nlat = 0;
  int nlon = 0;
  GridKind kind = GridKind::gaussian;
  std::vector<double> latitudes;     // radians
  std::vector<double> quad_weights;  // sum to 1

  /// True when the quadrature integrates polynomials in sin(lat) of degree
  /// <= 2*nlat-1 exactly (Gaussian grids only).  Equiangular grids carry
  /// cosine-proportional weights and give only approximate Parseval sums.
  bool exact_quadrature() const { return kind == GridKind::gaussian; }

  double area_weight(int i) const { return quad_weights[i] / nlon; }

  bool same_layout(const Grid& o) const {
    return nlat == o.nlat && nlon == o.nlon && kind == o.kind;
  }
};

/// Real scalar field on a grid, row-major and latitude-major.
struct GridField {
  Grid grid;
  std::vector<double> values;  // nlat * nlon
  std::string name;
  std::string units;

  double& at(int i, int j) { return values[static_cast<size_t>(i) * grid.nlon + j]; }
  double at(int i, int j) const { return values[static_cast<size_t>(i) * grid.nlon + j]; }
};

/// Gauss-Legendre nodes (descending) and weights on [-1, 1], weights summing
/// to 2.  Newton iteration on P_n, converged to residual <= 1e-14.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

Grid make_gaussian_grid(int nlat, int nlon);
Grid make_equiangular_grid(int nlat, int nlon);

GridField make_field(const Grid& grid, double fill = 0.0);

/// Latitude-weighted mean squared error: sum_ij dA(i,j) (x-y)^2.
double area_mean_square_error(const GridField& x, const GridField& y);

/// Area-weighted mean absolute error: sum_ij dA(i,j) |x-y|.
double area_mean_absolute_error(const GridField& x, const GridField& y);

void check_same_grid(const GridField& x, const GridField& y);

}  // namespace spectraloss

#endif

#include "spectraloss/loss.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "spectraloss/errors.hpp"

namespace spectraloss {

namespace {
constexpr double kPsdFloor = 1e-30;
}

LossKind loss_kind_from_string(const std::string& name) {
  if (name == "mse") return LossKind::mse;
  if (name == "amse") return LossKind::amse;
  if (name == "mae") return LossKind::mae;
  throw parameter_error("unknown loss kind: " + name);
}

const char* loss_kind_name(LossKind kind) {
  switch (kind) {
    case LossKind::mse: return "mse";
    case LossKind::amse: return "amse";
    case LossKind::mae: return "mae";
  }
  return "?";
}

ShellLossTerms amse_shell(const ShellPower& s, double dec_weight) {
  ShellLossTerms t;
  const double spx = std::sqrt(s.px);
  const double spy = std::sqrt(s.py);
  t.amplitude = (spx - spy) * (spx - spy);
  const double coh =
      s.cross / std::sqrt(std::max(s.px, kPsdFloor) * std::max(s.py, kPsdFloor));
  t.decoherence = dec_weight * 2.0 * std::max(s.px, s.py) * (1.0 - coh);
  return t;
}

ShellLossPartials amse_shell_partials(const ShellPower& s, double dec_weight) {
  const double spx = std::sqrt(std::max(s.px, kPsdFloor));
  const double spy = std::sqrt(std::max(s.py, kPsdFloor));
  ShellLossPartials p;
  p.d_px = 1.0 - spy / spx;
  if (s.px > s.py) {
    const double coh = s.cross / (spx * spy);
    p.d_px += dec_weight * (2.0 - coh);
    p.d_cross = -dec_weight * 2.0 * spx / spy;
  } else {
    p.d_px += dec_weight * s.cross * spy / (spx * spx * spx);
    p.d_cross = -dec_weight * 2.0 * spy / spx;
  }
  return p;
}

ShellLossTerms mse_shell(const ShellPower& s) {
  ShellLossTerms t;
  const double spx = std::sqrt(s.px);
  const double spy = std::sqrt(s.py);
  t.amplitude = (spx - spy) * (spx - spy);
  t.decoherence = 2.0 * (spx * spy - s.cross);
  return t;
}

ShellLossPartials mse_shell_partials(const ShellPower&) {
  return ShellLossPartials{1.0, -2.0};
}

namespace {

LossBreakdown breakdown_from_shells(const std::vector<ShellPower>& shells, LossKind kind,
                                    double dec_weight) {
  LossBreakdown b;
  b.kind = kind;
  b.per_k_amplitude.resize(shells.size());
  b.per_k_decoherence.resize(shells.size());
  for (size_t k = 0; k < shells.size(); ++k) {
    const ShellLossTerms t =
        (kind == LossKind::amse) ? amse_shell(shells[k], dec_weight) : mse_shell(shells[k]);
    b.per_k_amplitude[k] = t.amplitude;
    b.per_k_decoherence[k] = t.decoherence;
    b.total += t.amplitude + t.decoherence;
  }
  return b;
}

}  // namespace

LossBreakdown amse(const SpectralField& x, const SpectralField& y, double dec_weight) {
  return breakdown_from_shells(shell_powers(x, y), LossKind::amse, dec_weight);
}

LossBreakdown mse(const SpectralField& x, const SpectralField& y) {
  return breakdown_from_shells(shell_powers(x, y), LossKind::mse, 1.0);
}

double mae(const GridField& x, const GridField& y) { return area_mean_absolute_error(x, y); }

SpectralField amse_gradient_spectral(const SpectralField& x, const SpectralField& y,
                                     double dec_weight) {
  check_same_trunc(x, y);
  const std::vector<ShellPower> shells = shell_powers(x, y);
  SpectralField grad = make_spectral(x.trunc.K);
  for (int k = 0; k <= x.trunc.K; ++k) {
    const ShellLossPartials p = amse_shell_partials(shells[k], dec_weight);
    for (int l = 0; l <= k; ++l) {
      const size_t n = SpectralField::index(k, l);
      grad.coeffs[n] = 2.0 * p.d_px * x.coeffs[n] + p.d_cross * y.coeffs[n];
    }
  }
  return grad;
}

GridField amse_gradient(const SpectralField& x, const SpectralField& y, const Grid& grid,
                        double dec_weight) {
  const SpectralField gs = amse_gradient_spectral(x, y, dec_weight);
  GridField g = synthesize(gs, grid);
  for (int i = 0; i < grid.nlat; ++i) {
    const double da = grid.area_weight(i);
    for (int j = 0; j < grid.nlon; ++j) g.at(i, j) *= da;
  }
  return g;
}

GridField mse_gradient(const GridField& x, const GridField& y) {
  check_same_grid(x, y);
  GridField g = make_field(x.grid);
  for (int i = 0; i < x.grid.nlat; ++i) {
    const double da = x.grid.area_weight(i);
    for (int j = 0; j < x.grid.nlon; ++j) g.at(i, j) = 2.0 * da * (x.at(i, j) - y.at(i, j));
  }
  return g;
}

GridField mae_gradient(const GridField& x, const GridField& y) {
  check_same_grid(x, y);
  GridField g = make_field(x.grid);
  for (int i = 0; i < x.grid.nlat; ++i) {
    const double da = x.grid.area_weight(i);
    for (int j = 0; j < x.grid.nlon; ++j) {
      const double d = x.at(i, j) - y.at(i, j);
      g.at(i, j) = d > 0.0 ? da : (d < 0.0 ? -da : 0.0);
    }
  }
  return g;
}

VariableWeighting parse_weighting(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw io_error("cannot open weighting config: " + path);
  VariableWeighting w;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    VariableWeighting::Entry e;
    std::istringstream ss(line);
    std::string field;
    if (!std::getline(ss, e.name, ',')) continue;
    try {
      if (!std::getline(ss, field, ',')) throw std::invalid_argument("weight");
      e.weight = std::stod(field);
      if (!std::getline(ss, field, ',')) throw std::invalid_argument("level_weight");
      e.level_weight = std::stod(field);
      if (!std::getline(ss, field, ',')) throw std::invalid_argument("std");
      e.std = std::stod(field);
    } catch (const std::exception&) {
      throw format_error(path + ": bad weighting line " + std::to_string(lineno));
    }
    w.entries.push_back(e);
  }
  validate(w);
  return w;
}

void validate(const VariableWeighting& weighting) {
  if (weighting.entries.empty()) throw parameter_error("weighting: no variables");
  bool any_positive = false;
  for (const auto& e : weighting.entries) {
    if (e.weight < 0.0 || e.level_weight < 0.0)
      throw parameter_error("weighting: negative weight for " + e.name);
    if (!(e.std > 0.0)) throw parameter_error("weighting: std must be positive for " + e.name);
    if (e.weight * e.level_weight > 0.0) any_positive = true;
  }
  if (!any_positive) throw parameter_error("weighting: all variable weights are zero");
}

double weighted_multivariable_loss(const std::vector<GridField>& xs,
                                   const std::vector<GridField>& ys,
                                   const VariableWeighting& weighting, LossKind kind,
                                   Truncation trunc) {
  validate(weighting);
  if (xs.size() != weighting.entries.size() || ys.size() != weighting.entries.size())
    throw parameter_error("weighted loss: field count does not match weighting entries");
  double total = 0.0;
  for (size_t v = 0; v < xs.size(); ++v) {
    const auto& e = weighting.entries[v];
    const double w = e.weight * e.level_weight;
    if (w == 0.0) continue;
    GridField xn = xs[v];
    GridField yn = ys[v];
    check_same_grid(xn, yn);
    const double inv = 1.0 / e.std;
    for (auto& val : xn.values) val *= inv;
    for (auto& val : yn.values) val *= inv;
    double loss = 0.0;
    switch (kind) {
      case LossKind::mse: loss = area_mean_square_error(xn, yn); break;
      case LossKind::mae: loss = area_mean_absolute_error(xn, yn); break;
      case LossKind::amse:
        loss = amse(analyze(xn, trunc), analyze(yn, trunc)).total;
        break;
    }
    total += w * loss;
  }
  return total;
}

double kl_objective(double sigma, double rho) {
  const double q = 1.0 - rho * rho;
  const double r = 1.0 - rho * sigma;
  return std::log(sigma * sigma * q) + r * r / (2.0 * sigma * sigma * q);
}

KLOptimum kl_optimum(double rho) {
  if (!(rho > 0.0 && rho < 1.0 - 1e-6))
    throw parameter_error("kl_optimum: rho must lie in (0, 1 - 1e-6)");
  // dJ/dsigma = 2/sigma - (1 - rho sigma) / (sigma^3 (1-rho^2)) runs from
  // -inf to +inf with a single root; bisect it
  const double q = 1.0 - rho * rho;
  auto dj = [&](double s) { return 2.0 / s - (1.0 - rho * s) / (s * s * s * q); };
  double lo = 1e-6, hi = 8.0;
  for (int iter = 0; iter < 200 && hi - lo > 1e-12; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (dj(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  KLOptimum opt;
  opt.rho = rho;
  opt.optimal_sigma_ratio = 0.5 * (lo + hi);
  opt.objective_value = kl_objective(opt.optimal_sigma_ratio, rho);
  return opt;
}

double single_mode_expected_loss(double sigma, double rho, LossKind kind) {
  if (kind == LossKind::mse) return sigma * sigma + 1.0 - 2.0 * sigma * rho;
  if (kind == LossKind::amse)
    return (sigma - 1.0) * (sigma - 1.0) + 2.0 * std::max(sigma * sigma, 1.0) * (1.0 - rho);
  throw parameter_error("single-mode expectation: only mse and amse are defined");
}

double analytic_optima_sweep(double rho, LossKind kind) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw parameter_error("sweep: rho must lie in [0,1]");
  if (kind == LossKind::mae) throw parameter_error("sweep: only mse and amse are defined");
  double best_sigma = 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (int n = 0; n <= 2000; ++n) {
    const double sigma = n * 1e-3;
    const double value = single_mode_expected_loss(sigma, rho, kind);
    if (value < best) {
      best = value;
      best_sigma = sigma;
    }
  }
  return best_sigma;
}

}  // namespace spectraloss

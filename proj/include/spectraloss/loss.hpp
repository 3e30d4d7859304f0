#ifndef SPECTRALOSS_LOSS_HPP
#define SPECTRALOSS_LOSS_HPP

#include <string>
#include <vector>

#include "spectraloss/diagnostics.hpp"
#include "spectraloss/grid.hpp"
#include "spectraloss/sht.hpp"

namespace spectraloss {

enum class LossKind { mse, amse, mae };

LossKind loss_kind_from_string(const std::string& name);
const char* loss_kind_name(LossKind kind);

/// Scalar total plus the per-wavenumber amplitude / decoherence split.
struct LossBreakdown {
  double total = 0.0;
  std::vector<double> per_k_amplitude;
  std::vector<double> per_k_decoherence;
  LossKind kind = LossKind::mse;
};

struct ShellLossTerms {
  double amplitude = 0.0;
  double decoherence = 0.0;
};

/// Partial derivatives of one shell's loss with respect to px and cross
/// (py held fixed; the roles follow the gradient-in-x convention).
struct ShellLossPartials {
  double d_px = 0.0;
  double d_cross = 0.0;
};

/// Adjusted MSE terms of one shell:
///   amplitude   = (sqrt(px) - sqrt(py))^2
///   decoherence = dec_weight * 2 max(px, py) (1 - coh).
/// dec_weight is the optional relative weight between the two terms and
/// defaults to 1.  PSDs are floored at 1e-30 inside square roots and
/// quotients so gradients stay finite on zero-energy shells; at px == py the
/// py branch of the max subgradient is used.
ShellLossTerms amse_shell(const ShellPower& s, double dec_weight = 1.0);
ShellLossPartials amse_shell_partials(const ShellPower& s, double dec_weight = 1.0);

ShellLossTerms mse_shell(const ShellPower& s);
ShellLossPartials mse_shell_partials(const ShellPower& s);

/// Spectrally adjusted MSE: symmetric, non-negative, zero iff x == y.
LossBreakdown amse(const SpectralField& x, const SpectralField& y, double dec_weight = 1.0);

/// Plain MSE with its amplitude/decoherence split; total equals
/// spectral_mse(x, y).
LossBreakdown mse(const SpectralField& x, const SpectralField& y);

/// Area-weighted mean absolute error (spatial only).
double mae(const GridField& x, const GridField& y);

/// Gradient of amse(x, y) with respect to x in the weighted-real spectral
/// inner product <u,v> = sum w_l Re(u v*).
SpectralField amse_gradient_spectral(const SpectralField& x, const SpectralField& y,
                                     double dec_weight = 1.0);

/// Gradient of amse(analyze(xg), y) with respect to the gridpoint values of
/// xg: dA(i,j) * synthesize(spectral gradient).
GridField amse_gradient(const SpectralField& x, const SpectralField& y, const Grid& grid,
                        double dec_weight = 1.0);

/// Gradient of the spatial MSE with respect to x: 2 dA (x - y).
GridField mse_gradient(const GridField& x, const GridField& y);

/// Gradient of the spatial MAE with respect to x: dA sign(x - y).
GridField mae_gradient(const GridField& x, const GridField& y);

/// Per-variable weighting entry: total weight = weight * level_weight, with
/// fields normalized by std before the loss.
struct VariableWeighting {
  struct Entry {
    std::string name;
    double weight = 1.0;
    double level_weight = 1.0;
    double std = 1.0;
  };
  std::vector<Entry> entries;
};

/// Plain-text config, one line per variable: `name,weight,level_weight,std`.
/// Blank lines and lines starting with '#' are skipped.
VariableWeighting parse_weighting(const std::string& path);
void validate(const VariableWeighting& weighting);

/// sum_v weight_v * level_v * loss(x_v / s_v, y_v / s_v).  The truncation is
/// used only for the spectral kinds.
double weighted_multivariable_loss(const std::vector<GridField>& xs,
                                   const std::vector<GridField>& ys,
                                   const VariableWeighting& weighting, LossKind kind,
                                   Truncation trunc);

/// Appendix-style KL study: minimize
///   log(sigma^2 (1-rho^2)) + (1 - rho sigma)^2 / (2 sigma^2 (1-rho^2))
/// over sigma with sigma_Y = 1.
struct KLOptimum {
  double rho = 0.0;
  double optimal_sigma_ratio = 0.0;
  double objective_value = 0.0;
};

double kl_objective(double sigma, double rho);
KLOptimum kl_optimum(double rho);

/// Expected single-mode loss at prediction amplitude sigma against a
/// unit-variance target with correlation rho:
///   mse:  sigma^2 + 1 - 2 sigma rho
///   amse: (sigma - 1)^2 + 2 max(sigma^2, 1) (1 - rho)
double single_mode_expected_loss(double sigma, double rho, LossKind kind);

/// Dense sweep (step 1e-3) of the expected single-mode loss over the
/// prediction amplitude sigma; the target has unit variance and correlation
/// rho.  MSE minimizes at sigma = rho, AMSE at sigma = 1.
double analytic_optima_sweep(double rho, LossKind kind);

}  // namespace spectraloss

#endif

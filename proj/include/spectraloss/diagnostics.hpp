#ifndef SPECTRALOSS_DIAGNOSTICS_HPP
#define SPECTRALOSS_DIAGNOSTICS_HPP

#include <optional>
#include <ostream>
#include <vector>

#include "spectraloss/sht.hpp"

namespace spectraloss {

/// Zonal-weighted power sums at one total wavenumber:
///   px = sum_l w_l |alpha_x|^2, py likewise, cross = sum_l w_l Re(alpha_x alpha_y*).
struct ShellPower {
  double px = 0.0;
  double py = 0.0;
  double cross = 0.0;
};

std::vector<ShellPower> shell_powers(const SpectralField& x, const SpectralField& y);

/// Per-wavenumber PSD, cross power, coherence, and amplitude ratio.
/// Coherence is defined as 0 whenever either PSD vanishes (a zero-energy
/// scale carries no phase information); the amplitude ratio of two zero
/// shells is 1.
struct SpectralDiagnostics {
  Truncation trunc;
  std::vector<double> psd_x;
  std::vector<double> psd_y;
  std::vector<double> cross;
  std::vector<double> coherence;
  std::vector<double> amplitude_ratio;
};

SpectralDiagnostics diagnostics(const SpectralField& x, const SpectralField& y);
SpectralDiagnostics diagnostics_from_powers(Truncation trunc, const std::vector<ShellPower>& shells);

/// Per-wavenumber split of the spectral MSE:
///   amplitude    = (sqrt(px) - sqrt(py))^2
///   decoherence  = 2 sqrt(px py) (1 - coh)
/// Terms sum over k to spectral_mse(x, y).
struct DecompositionTerm {
  double amplitude = 0.0;
  double decoherence = 0.0;
};

std::vector<DecompositionTerm> mse_decomposition(const SpectralField& x, const SpectralField& y);

enum class ResolutionMode { dissipation, noise };

/// Crossing-based effective resolution.  Dissipation: first k where the
/// amplitude ratio drops below sqrt(energy_threshold) and stays below for the
/// next three wavenumbers.  Noise: first k where the ratio exceeds 1 and
/// stays above for the next three.  Wavenumbers 0..3 are excluded; returns
/// nullopt when no persistent crossing exists within the truncation.
std::optional<int> effective_resolution(const SpectralDiagnostics& diag, ResolutionMode mode,
                                        double energy_threshold = 0.75);

/// Fourth-order spectral high-pass response 1 - k0^4 / (k0^4 + k^4).
double highpass_factor(int k, double k0);
SpectralField highpass(const SpectralField& spec, double k0);

/// Combine per-variable diagnostics with the loss-style variable weights.
/// Each variable's psd_x, psd_y, and cross power are normalized by its own
/// per-k psd_y before the weighted mean, so the aggregate psd_x(k) is a
/// weighted mean of squared amplitude ratios and psd_y(k) is identically 1.
/// Variables with zero psd_y at some k drop out of that wavenumber.
SpectralDiagnostics aggregate_diagnostics(const std::vector<SpectralDiagnostics>& vars,
                                          const std::vector<double>& weights);

/// CSV emission: `k,psd_x,psd_y,coherence,amplitude_ratio`.
void write_diagnostics_csv(const SpectralDiagnostics& diag, std::ostream& out);

}  // namespace spectraloss

#endif

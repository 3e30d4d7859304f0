#ifndef SPECTRALOSS_TOY_TRAIN_HPP
#define SPECTRALOSS_TOY_TRAIN_HPP

#include <cstdint>
#include <ostream>
#include <utility>
#include <vector>

#include "spectraloss/loss.hpp"
#include "spectraloss/rng.hpp"
#include "spectraloss/sht.hpp"

namespace spectraloss {

/// Synthetic target ensemble: PSD_k proportional to (1+k)^(-slope),
/// normalized to sum 1 over shells, with per-shell predictability rho_k.
struct SyntheticSpec {
  int K = 42;
  double slope = 0.0;
  std::vector<double> rho;  // size K+1, values in [0,1]
  std::uint64_t seed = 12345;
};

void validate(const SyntheticSpec& spec);

/// Normalized per-shell power profile.
std::vector<double> power_profile(const SyntheticSpec& spec);

std::vector<double> rho_profile_const(int K, double rho);
/// rho_k = exp(-k/K): fine scales are less predictable.
std::vector<double> rho_profile_exp(int K);

/// Draw one (input, target) pair.  Per (k,l) the target coefficient is
/// complex Gaussian with variance PSD_k/(2k+1); the input is
/// rho_k * target + sqrt(1 - rho_k^2) * an independent same-variance draw,
/// so input and target share the expected PSD and the expected per-shell
/// coherence equals rho_k.
std::pair<SpectralField, SpectralField> sample_pair(const SyntheticSpec& spec, Rng& rng);
std::pair<SpectralField, SpectralField> sample_pair(const SyntheticSpec& spec);

/// Per-wavenumber diagonal gain, the learnable predictor.
struct GainModel {
  std::vector<double> g;  // size K+1
  int step_count = 0;
};

struct TrainConfig {
  LossKind kind = LossKind::amse;
  int steps = 500;
  int batch = 32;
  double lr0 = 20.0;       // geometric decay from lr0 to lr_final
  double lr_final = 0.5;
  std::uint64_t seed = 12345;
  double ema_beta = 0.995;  // smoothing for trajectory statistics
  int emit_every = 1;
  double dec_weight = 1.0;
  double diverge_abs = 1e3;
};

struct TrajectoryRow {
  int step = 0;
  int k = 0;
  double gain = 0.0;
  double amplitude_ratio = 0.0;
  double coherence = 0.0;
};

struct TrainResult {
  GainModel model;
  std::vector<TrajectoryRow> trajectory;
};

/// SGD on the per-shell gains.  Each step draws a batch of pairs, pools the
/// per-shell power and cross-power over the batch, and differentiates the
/// chosen loss of the pooled statistics with respect to each gain.  The
/// trajectory reports EMA-smoothed amplitude ratio and coherence of the
/// prediction against the target.  Throws on divergence (|g| > diverge_abs).
TrainResult train(const SyntheticSpec& spec, const TrainConfig& config);

/// CSV: `step,k,amplitude_ratio,coherence`, one row per (emitted step, k).
void emit_fig2_analog(const std::vector<TrajectoryRow>& trajectory, std::ostream& out);

}  // namespace spectraloss

#endif

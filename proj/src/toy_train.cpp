#include "spectraloss/toy_train.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "spectraloss/csvfmt.hpp"
#include "spectraloss/errors.hpp"
#include "spectraloss/grid.hpp"

namespace spectraloss {

void validate(const SyntheticSpec& spec) {
  if (spec.K < 0) throw parameter_error("synthetic spec: K must be >= 0");
  if (spec.slope < 0.0) throw parameter_error("synthetic spec: slope must be >= 0");
  if (spec.rho.size() != static_cast<size_t>(spec.K + 1))
    throw parameter_error("synthetic spec: rho profile must have K+1 entries");
  for (double r : spec.rho)
    if (!(r >= 0.0 && r <= 1.0)) throw parameter_error("synthetic spec: rho_k must lie in [0,1]");
}

std::vector<double> power_profile(const SyntheticSpec& spec) {
  std::vector<double> psd(spec.K + 1);
  double sum = 0.0;
  for (int k = 0; k <= spec.K; ++k) {
    psd[k] = std::pow(1.0 + k, -spec.slope);
    sum += psd[k];
  }
  for (auto& p : psd) p /= sum;
  return psd;
}

std::vector<double> rho_profile_const(int K, double rho) {
  return std::vector<double>(K + 1, rho);
}

std::vector<double> rho_profile_exp(int K) {
  std::vector<double> rho(K + 1);
  for (int k = 0; k <= K; ++k) rho[k] = std::exp(-static_cast<double>(k) / K);
  return rho;
}

namespace {

void sample_pair_into(const SyntheticSpec& spec, const std::vector<double>& psd, Rng& rng,
                      SpectralField& input, SpectralField& target) {
  const int K = spec.K;
  for (int k = 0; k <= K; ++k) {
    const double var = psd[k] / (2.0 * k + 1.0);
    const double amp0 = std::sqrt(var);
    const double amp = std::sqrt(0.5 * var);
    const double rho = spec.rho[k];
    const double q = std::sqrt(1.0 - rho * rho);
    for (int l = 0; l <= k; ++l) {
      const size_t n = SpectralField::index(k, l);
      if (l == 0) {
        const double t = amp0 * rng.gaussian();
        const double z = amp0 * rng.gaussian();
        target.coeffs[n] = {t, 0.0};
        input.coeffs[n] = {rho * t + q * z, 0.0};
      } else {
        const double tr = amp * rng.gaussian();
        const double ti = amp * rng.gaussian();
        const double zr = amp * rng.gaussian();
        const double zi = amp * rng.gaussian();
        target.coeffs[n] = {tr, ti};
        input.coeffs[n] = {rho * tr + q * zr, rho * ti + q * zi};
      }
    }
  }
}

}  // namespace

std::pair<SpectralField, SpectralField> sample_pair(const SyntheticSpec& spec, Rng& rng) {
  validate(spec);
  const std::vector<double> psd = power_profile(spec);
  SpectralField input = make_spectral(spec.K);
  SpectralField target = make_spectral(spec.K);
  sample_pair_into(spec, psd, rng, input, target);
  return {std::move(input), std::move(target)};
}

std::pair<SpectralField, SpectralField> sample_pair(const SyntheticSpec& spec) {
  Rng rng(spec.seed);
  return sample_pair(spec, rng);
}

TrainResult train(const SyntheticSpec& spec, const TrainConfig& config) {
  validate(spec);
  if (config.steps < 1) throw parameter_error("train: steps must be >= 1");
  if (config.batch < 1) throw parameter_error("train: batch must be >= 1");
  if (!(config.lr0 > 0.0) || !(config.lr_final > 0.0))
    throw parameter_error("train: learning rates must be positive");
  if (!(config.ema_beta >= 0.0 && config.ema_beta < 1.0))
    throw parameter_error("train: ema_beta must lie in [0,1)");
  if (config.emit_every < 1) throw parameter_error("train: emit_every must be >= 1");

  const int K = spec.K;
  const int B = config.batch;
  const std::vector<double> psd = power_profile(spec);

  // mae differentiates through grid space and needs an admissible grid
  Grid grid;
  std::shared_ptr<const SphericalTransform> transform;
  if (config.kind == LossKind::mae) {
    const int nlat = std::max(2, K + 1);
    const int nlon = std::max(4, 2 * K + 2);
    grid = make_gaussian_grid(nlat, nlon);
    transform = get_transform(grid, Truncation{K});
  }

  TrainResult result;
  result.model.g.assign(K + 1, 1.0);
  std::vector<double>& g = result.model.g;

  std::vector<double> ema_pred(K + 1, 0.0), ema_tgt(K + 1, 0.0), ema_cross(K + 1, 0.0);
  std::vector<double> pin_s(static_cast<size_t>(B) * (K + 1));
  std::vector<double> ptg_s(static_cast<size_t>(B) * (K + 1));
  std::vector<double> cro_s(static_cast<size_t>(B) * (K + 1));
  std::vector<double> mae_s;  // per-sample per-shell mae gain derivative
  if (config.kind == LossKind::mae) mae_s.resize(pin_s.size());

  for (int step = 0; step < config.steps; ++step) {
    const double frac = config.steps > 1 ? static_cast<double>(step) / (config.steps - 1) : 0.0;
    const double lr = config.lr0 * std::pow(config.lr_final / config.lr0, frac);

#pragma omp parallel
    {
      SpectralField input = make_spectral(K);
      SpectralField target = make_spectral(K);
#pragma omp for schedule(static)
      for (int b = 0; b < B; ++b) {
        Rng rng = Rng::stream(spec.seed, static_cast<std::uint64_t>(step) * B + b);
        sample_pair_into(spec, psd, rng, input, target);
        double* pin = &pin_s[static_cast<size_t>(b) * (K + 1)];
        double* ptg = &ptg_s[static_cast<size_t>(b) * (K + 1)];
        double* cro = &cro_s[static_cast<size_t>(b) * (K + 1)];
        for (int k = 0; k <= K; ++k) {
          double a = 0.0, t = 0.0, c = 0.0;
          for (int l = 0; l <= k; ++l) {
            const size_t n = SpectralField::index(k, l);
            const double w = zonal_weight(l);
            a += w * std::norm(input.coeffs[n]);
            t += w * std::norm(target.coeffs[n]);
            c += w * (input.coeffs[n].real() * target.coeffs[n].real() +
                      input.coeffs[n].imag() * target.coeffs[n].imag());
          }
          pin[k] = a;
          ptg[k] = t;
          cro[k] = c;
        }
        if (config.kind == LossKind::mae) {
          SpectralField pred = input;
          for (int k = 0; k <= K; ++k)
            for (int l = 0; l <= k; ++l) pred.coeffs[SpectralField::index(k, l)] *= g[k];
          const GridField xg = transform->synthesize(pred);
          const GridField yg = transform->synthesize(target);
          GridField sgn = make_field(grid);
          for (size_t n = 0; n < sgn.values.size(); ++n) {
            const double d = xg.values[n] - yg.values[n];
            sgn.values[n] = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
          }
          const SpectralField adj = transform->analyze(sgn);
          double* ms = &mae_s[static_cast<size_t>(b) * (K + 1)];
          for (int k = 0; k <= K; ++k) {
            double acc = 0.0;
            for (int l = 0; l <= k; ++l) {
              const size_t n = SpectralField::index(k, l);
              acc += zonal_weight(l) * (adj.coeffs[n].real() * input.coeffs[n].real() +
                                        adj.coeffs[n].imag() * input.coeffs[n].imag());
            }
            ms[k] = acc;
          }
        }
      }
    }

    // deterministic serial reduction over the batch
    std::vector<double> pin(K + 1, 0.0), ptg(K + 1, 0.0), cro(K + 1, 0.0), mgr(K + 1, 0.0);
    for (int b = 0; b < B; ++b) {
      for (int k = 0; k <= K; ++k) {
        pin[k] += pin_s[static_cast<size_t>(b) * (K + 1) + k];
        ptg[k] += ptg_s[static_cast<size_t>(b) * (K + 1) + k];
        cro[k] += cro_s[static_cast<size_t>(b) * (K + 1) + k];
        if (config.kind == LossKind::mae) mgr[k] += mae_s[static_cast<size_t>(b) * (K + 1) + k];
      }
    }
    const double inv_b = 1.0 / B;
    for (int k = 0; k <= K; ++k) {
      pin[k] *= inv_b;
      ptg[k] *= inv_b;
      cro[k] *= inv_b;
      mgr[k] *= inv_b;
    }

    for (int k = 0; k <= K; ++k) {
      double grad;
      const ShellPower s{g[k] * g[k] * pin[k], ptg[k], g[k] * cro[k]};
      if (config.kind == LossKind::mae) {
        grad = mgr[k];
      } else {
        const ShellLossPartials p = (config.kind == LossKind::amse)
                                        ? amse_shell_partials(s, config.dec_weight)
                                        : mse_shell_partials(s);
        grad = p.d_px * 2.0 * g[k] * pin[k] + p.d_cross * cro[k];
      }
      g[k] -= lr * grad;
      if (!(std::abs(g[k]) <= config.diverge_abs)) {
        std::ostringstream msg;
        msg << "toy training diverged: step " << step + 1 << ", k=" << k << ", g=" << g[k]
            << ", lr=" << lr;
        throw std::runtime_error(msg.str());
      }
      const double beta = (step == 0) ? 0.0 : config.ema_beta;
      ema_pred[k] = beta * ema_pred[k] + (1.0 - beta) * (g[k] * g[k] * pin[k]);
      ema_tgt[k] = beta * ema_tgt[k] + (1.0 - beta) * ptg[k];
      ema_cross[k] = beta * ema_cross[k] + (1.0 - beta) * (g[k] * cro[k]);
    }
    result.model.step_count = step + 1;

    if (step % config.emit_every == 0 || step == config.steps - 1) {
      for (int k = 0; k <= K; ++k) {
        TrajectoryRow row;
        row.step = step + 1;
        row.k = k;
        row.gain = g[k];
        row.amplitude_ratio = ema_tgt[k] > 0.0 ? std::sqrt(ema_pred[k] / ema_tgt[k]) : 1.0;
        const double denom = ema_pred[k] * ema_tgt[k];
        row.coherence = denom > 0.0 ? ema_cross[k] / std::sqrt(denom) : 0.0;
        result.trajectory.push_back(row);
      }
    }
  }
  return result;
}

void emit_fig2_analog(const std::vector<TrajectoryRow>& trajectory, std::ostream& out) {
  if (trajectory.empty()) throw parameter_error("emit_fig2_analog: empty trajectory");
  out << "step,k,amplitude_ratio,coherence\n";
  for (const auto& row : trajectory) {
    out << row.step << ',' << row.k << ',' << fmt_full(row.amplitude_ratio) << ','
        << fmt_full(row.coherence) << '\n';
  }
}

}  // namespace spectraloss

#include "spectraloss/diagnostics.hpp"

#include <cmath>
#include <limits>

#include "spectraloss/csvfmt.hpp"
#include "spectraloss/errors.hpp"

namespace spectraloss {

std::vector<ShellPower> shell_powers(const SpectralField& x, const SpectralField& y) {
  check_same_trunc(x, y);
  const int K = x.trunc.K;
  std::vector<ShellPower> shells(K + 1);
  for (int k = 0; k <= K; ++k) {
    ShellPower s;
    for (int l = 0; l <= k; ++l) {
      const size_t n = SpectralField::index(k, l);
      const double w = zonal_weight(l);
      s.px += w * std::norm(x.coeffs[n]);
      s.py += w * std::norm(y.coeffs[n]);
      s.cross += w * (x.coeffs[n].real() * y.coeffs[n].real() +
                      x.coeffs[n].imag() * y.coeffs[n].imag());
    }
    shells[k] = s;
  }
  return shells;
}

SpectralDiagnostics diagnostics_from_powers(Truncation trunc,
                                            const std::vector<ShellPower>& shells) {
  SpectralDiagnostics d;
  d.trunc = trunc;
  const size_t n = shells.size();
  d.psd_x.resize(n);
  d.psd_y.resize(n);
  d.cross.resize(n);
  d.coherence.resize(n);
  d.amplitude_ratio.resize(n);
  for (size_t k = 0; k < n; ++k) {
    const ShellPower& s = shells[k];
    d.psd_x[k] = s.px;
    d.psd_y[k] = s.py;
    d.cross[k] = s.cross;
    d.coherence[k] = (s.px > 0.0 && s.py > 0.0) ? s.cross / std::sqrt(s.px * s.py) : 0.0;
    if (s.py > 0.0)
      d.amplitude_ratio[k] = std::sqrt(s.px / s.py);
    else
      d.amplitude_ratio[k] = s.px > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
  }
  return d;
}

SpectralDiagnostics diagnostics(const SpectralField& x, const SpectralField& y) {
  return diagnostics_from_powers(x.trunc, shell_powers(x, y));
}

std::vector<DecompositionTerm> mse_decomposition(const SpectralField& x, const SpectralField& y) {
  const std::vector<ShellPower> shells = shell_powers(x, y);
  std::vector<DecompositionTerm> terms(shells.size());
  for (size_t k = 0; k < shells.size(); ++k) {
    const double spx = std::sqrt(shells[k].px);
    const double spy = std::sqrt(shells[k].py);
    terms[k].amplitude = (spx - spy) * (spx - spy);
    terms[k].decoherence = 2.0 * (spx * spy - shells[k].cross);
  }
  return terms;
}

std::optional<int> effective_resolution(const SpectralDiagnostics& diag, ResolutionMode mode,
                                        double energy_threshold) {
  if (!(energy_threshold > 0.0 && energy_threshold < 1.0))
    throw parameter_error("energy threshold must lie in (0,1)");
  const int K = diag.trunc.K;
  const double lo = std::sqrt(energy_threshold);
  const int persist = 3;
  for (int k = 4; k + persist <= K; ++k) {
    bool hit = true;
    for (int m = 0; m <= persist && hit; ++m) {
      const double r = diag.amplitude_ratio[k + m];
      hit = (mode == ResolutionMode::dissipation) ? (r < lo) : (r > 1.0);
    }
    if (hit) return k;
  }
  return std::nullopt;
}

double highpass_factor(int k, double k0) {
  if (!(k0 > 0.0)) throw parameter_error("highpass cutoff must be positive");
  const double k4 = static_cast<double>(k) * k * static_cast<double>(k) * k;
  const double c4 = k0 * k0 * k0 * k0;
  return 1.0 - c4 / (c4 + k4);
}

SpectralField highpass(const SpectralField& spec, double k0) {
  SpectralField out = spec;
  for (int k = 0; k <= spec.trunc.K; ++k) {
    const double h = highpass_factor(k, k0);
    for (int l = 0; l <= k; ++l) out.coeffs[SpectralField::index(k, l)] *= h;
  }
  return out;
}

SpectralDiagnostics aggregate_diagnostics(const std::vector<SpectralDiagnostics>& vars,
                                          const std::vector<double>& weights) {
  if (vars.empty()) throw parameter_error("aggregate_diagnostics: empty variable list");
  if (vars.size() != weights.size())
    throw parameter_error("aggregate_diagnostics: one weight per variable required");
  double wsum = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw parameter_error("aggregate_diagnostics: negative weight");
    wsum += w;
  }
  if (!(wsum > 0.0)) throw parameter_error("aggregate_diagnostics: weights sum to zero");
  const int K = vars[0].trunc.K;
  for (const auto& v : vars)
    if (v.trunc.K != K) throw shape_error("aggregate_diagnostics: truncations differ");

  std::vector<ShellPower> shells(K + 1);
  for (int k = 0; k <= K; ++k) {
    double wk = 0.0;
    ShellPower s;
    for (size_t v = 0; v < vars.size(); ++v) {
      const double py = vars[v].psd_y[k];
      if (!(py > 0.0) || weights[v] == 0.0) continue;
      s.px += weights[v] * vars[v].psd_x[k] / py;
      s.py += weights[v];
      s.cross += weights[v] * vars[v].cross[k] / py;
      wk += weights[v];
    }
    if (wk > 0.0) {
      s.px /= wk;
      s.py /= wk;
      s.cross /= wk;
    }
    shells[k] = s;
  }
  return diagnostics_from_powers(Truncation{K}, shells);
}

void write_diagnostics_csv(const SpectralDiagnostics& diag, std::ostream& out) {
  out << "k,psd_x,psd_y,coherence,amplitude_ratio\n";
  for (int k = 0; k <= diag.trunc.K; ++k) {
    out << k << ',' << fmt_full(diag.psd_x[k]) << ',' << fmt_full(diag.psd_y[k]) << ','
        << fmt_full(diag.coherence[k]) << ',' << fmt_full(diag.amplitude_ratio[k]) << '\n';
  }
}

}  // namespace spectraloss

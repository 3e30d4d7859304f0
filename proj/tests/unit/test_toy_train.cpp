#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "helpers.hpp"
#include "spectraloss/errors.hpp"
#include "spectraloss/toy_train.hpp"

using namespace spectraloss;
using testutil::rel_err;

namespace {

SyntheticSpec flat_spec(int K, double rho, std::uint64_t seed) {
  SyntheticSpec spec;
  spec.K = K;
  spec.slope = 0.0;
  spec.rho = rho_profile_const(K, rho);
  spec.seed = seed;
  return spec;
}

double mean_gain(const GainModel& m) {
  double acc = 0.0;
  for (double g : m.g) acc += g;
  return acc / m.g.size();
}

}  // namespace

TEST_CASE("synthetic spec validation and power profile") {
  SyntheticSpec spec = flat_spec(8, 0.5, 1);
  CHECK_NOTHROW(validate(spec));
  const auto psd = power_profile(spec);
  double sum = 0.0;
  for (double p : psd) sum += p;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));

  spec.rho[3] = 1.5;
  CHECK_THROWS_AS(validate(spec), parameter_error);
  spec.rho.pop_back();
  CHECK_THROWS_AS(validate(spec), parameter_error);
}

TEST_CASE("perfect predictability: input equals target exactly") {
  const SyntheticSpec spec = flat_spec(12, 1.0, 2);
  auto [input, target] = sample_pair(spec);
  for (size_t n = 0; n < input.coeffs.size(); ++n) CHECK(input.coeffs[n] == target.coeffs[n]);
}

TEST_CASE("zero predictability: empirical coherence is statistical noise") {
  const int K = 10;
  const SyntheticSpec spec = flat_spec(K, 0.0, 3);
  const int samples = 500;
  std::vector<double> pin(K + 1, 0.0), ptg(K + 1, 0.0), cross(K + 1, 0.0);
  Rng rng(spec.seed);
  for (int s = 0; s < samples; ++s) {
    auto [input, target] = sample_pair(spec, rng);
    const auto shells = shell_powers(input, target);
    for (int k = 0; k <= K; ++k) {
      pin[k] += shells[k].px;
      ptg[k] += shells[k].py;
      cross[k] += shells[k].cross;
    }
  }
  for (int k = 0; k <= K; ++k) {
    const double coh = cross[k] / std::sqrt(pin[k] * ptg[k]);
    CHECK(std::abs(coh) <= 3.0 / std::sqrt(samples * (2.0 * k + 1.0)));
  }
}

TEST_CASE("construction preserves variance: PSD ratio within 5 percent") {
  const int K = 10;
  SyntheticSpec spec = flat_spec(K, 0.5, 4);
  spec.rho = rho_profile_exp(K);
  const int samples = 500;
  std::vector<double> pin(K + 1, 0.0), ptg(K + 1, 0.0);
  Rng rng(spec.seed);
  for (int s = 0; s < samples; ++s) {
    auto [input, target] = sample_pair(spec, rng);
    const auto shells = shell_powers(input, target);
    for (int k = 0; k <= K; ++k) {
      pin[k] += shells[k].px;
      ptg[k] += shells[k].py;
    }
  }
  for (int k = 0; k <= K; ++k) CHECK(rel_err(pin[k] / ptg[k], 1.0) <= 0.05);

  SUBCASE("expected per-shell coherence tracks rho_k") {
    std::vector<double> cross(K + 1, 0.0);
    Rng rng2(77);
    std::vector<double> pin2(K + 1, 0.0), ptg2(K + 1, 0.0);
    for (int s = 0; s < samples; ++s) {
      auto [input, target] = sample_pair(spec, rng2);
      const auto shells = shell_powers(input, target);
      for (int k = 0; k <= K; ++k) {
        pin2[k] += shells[k].px;
        ptg2[k] += shells[k].py;
        cross[k] += shells[k].cross;
      }
    }
    for (int k = 0; k <= K; ++k) {
      const double coh = cross[k] / std::sqrt(pin2[k] * ptg2[k]);
      CHECK(std::abs(coh - spec.rho[k]) <= 4.0 / std::sqrt(samples * (2.0 * k + 1.0)));
    }
  }
}

TEST_CASE("perfect predictability converges to unit gain under both losses") {
  const SyntheticSpec spec = flat_spec(10, 1.0, 5);
  TrainConfig cfg;
  cfg.steps = 300;
  cfg.batch = 8;
  cfg.lr0 = 5.0;
  cfg.lr_final = 0.5;
  cfg.seed = 5;
  for (LossKind kind : {LossKind::mse, LossKind::amse}) {
    cfg.kind = kind;
    const TrainResult r = train(spec, cfg);
    for (double g : r.model.g) CHECK(std::abs(g - 1.0) <= 1e-3);
  }
}

TEST_CASE("MSE training converges to rho and tracks coherence per shell") {
  // per-mode smoothing law: gains settle at rho = 0.5, and the trajectory's
  // EMA amplitude ratio matches its coherence shell by shell
  const SyntheticSpec spec = flat_spec(42, 0.5, 20240601);
  TrainConfig cfg;
  cfg.kind = LossKind::mse;
  cfg.steps = 2000;
  cfg.batch = 32;
  cfg.lr0 = 20.0;
  cfg.lr_final = 0.3;
  cfg.seed = 20240601;
  cfg.ema_beta = 0.995;
  cfg.emit_every = 100;
  const TrainResult r = train(spec, cfg);
  CHECK(std::abs(mean_gain(r.model) - 0.5) <= 0.05);

  const size_t rows = r.trajectory.size();
  REQUIRE(rows >= 43);
  double worst_gap = 0.0;
  for (size_t n = rows - 43; n < rows; ++n) {
    const TrajectoryRow& row = r.trajectory[n];
    worst_gap = std::max(worst_gap, std::abs(row.amplitude_ratio - row.coherence));
  }
  CHECK(worst_gap <= 0.05);
}

TEST_CASE("AMSE training converges to unit gain at rho = 0.5") {
  const SyntheticSpec spec = flat_spec(160, 0.5, 909);
  TrainConfig cfg;
  cfg.kind = LossKind::amse;
  cfg.steps = 2000;
  cfg.batch = 32;
  cfg.lr0 = 20.0;
  cfg.lr_final = 0.3;
  cfg.seed = 909;
  cfg.emit_every = 2000;
  const TrainResult r = train(spec, cfg);
  CHECK(std::abs(mean_gain(r.model) - 1.0) <= 0.05);

  // converged amplitude ratio sits at 1 even though rho < 1
  const size_t rows = r.trajectory.size();
  REQUIRE(rows >= 161);
  double mean_ar = 0.0;
  for (size_t n = rows - 161; n < rows; ++n) mean_ar += r.trajectory[n].amplitude_ratio;
  mean_ar /= 161.0;
  CHECK(std::abs(mean_ar - 1.0) <= 0.05);
}

TEST_CASE("divergence aborts with diagnostics") {
  const SyntheticSpec spec = flat_spec(6, 0.5, 6);
  TrainConfig cfg;
  cfg.kind = LossKind::mse;
  cfg.steps = 200;
  cfg.batch = 2;
  cfg.lr0 = 2e4;  // far past the stability limit
  cfg.lr_final = 2e4;
  cfg.seed = 6;
  CHECK_THROWS_WITH_AS(train(spec, cfg), doctest::Contains("diverged"), std::runtime_error);
}

TEST_CASE("fig2-analog emission") {
  const SyntheticSpec spec = flat_spec(9, 0.5, 7);
  TrainConfig cfg;
  cfg.kind = LossKind::mse;
  cfg.steps = 1;
  cfg.batch = 4;
  cfg.seed = 7;
  const TrainResult r = train(spec, cfg);
  std::ostringstream out;
  emit_fig2_analog(r.trajectory, out);
  const std::string s = out.str();
  CHECK(std::count(s.begin(), s.end(), '\n') == 1 + 10);  // header + (K+1) rows

  SUBCASE("byte-identical across runs and thread counts") {
    std::ostringstream again;
    emit_fig2_analog(train(spec, cfg).trajectory, again);
    CHECK(again.str() == s);
#ifdef _OPENMP
    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    std::ostringstream serial;
    emit_fig2_analog(train(spec, cfg).trajectory, serial);
    omp_set_num_threads(saved);
    CHECK(serial.str() == s);
#endif
  }
}

TEST_CASE("mae training runs and stays finite") {
  const SyntheticSpec spec = flat_spec(8, 0.7, 8);
  TrainConfig cfg;
  cfg.kind = LossKind::mae;
  cfg.steps = 20;
  cfg.batch = 4;
  cfg.lr0 = 2.0;
  cfg.lr_final = 0.5;
  cfg.seed = 8;
  const TrainResult r = train(spec, cfg);
  for (double g : r.model.g) CHECK(std::isfinite(g));
}

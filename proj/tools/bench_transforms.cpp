// Times the production transforms against the serial direct-summation
// reference at a few desk-scale sizes.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "spectraloss/rng.hpp"
#include "spectraloss/sht.hpp"
#include "spectraloss/sht_reference.hpp"
#include "spectraloss/toy_train.hpp"

namespace sl = spectraloss;
using clock_type = std::chrono::steady_clock;

namespace {

double time_ms(const std::function<void()>& fn, int reps) {
  fn();  // warm-up
  const auto t0 = clock_type::now();
  for (int r = 0; r < reps; ++r) fn();
  const auto t1 = clock_type::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

}  // namespace

int main(int argc, char** argv) {
  const int reps = argc > 1 ? std::atoi(argv[1]) : 5;
#ifdef _OPENMP
  if (const char* env = std::getenv("SPECTRALOSS_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) omp_set_num_threads(n);
  }
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (OpenMP disabled)\n");
#endif

  const int configs[][3] = {{32, 64, 21}, {64, 128, 42}, {128, 256, 85}, {256, 512, 170}};
  std::printf("%6s %6s %5s | %12s %12s %12s %12s | %9s\n", "nlat", "nlon", "K", "analyze(ms)",
              "synth(ms)", "ref_ana(ms)", "ref_syn(ms)", "max_err");
  for (const auto& c : configs) {
    const int nlat = c[0], nlon = c[1], K = c[2];
    const sl::Grid grid = sl::make_gaussian_grid(nlat, nlon);
    auto transform = sl::get_transform(grid, sl::Truncation{K});

    sl::SyntheticSpec spec;
    spec.K = K;
    spec.slope = 2.0;
    spec.rho = sl::rho_profile_exp(K);
    spec.seed = 7;
    auto [input, target] = sl::sample_pair(spec);
    const sl::GridField field = transform->synthesize(target);

    const double t_ana = time_ms([&] { (void)transform->analyze(field); }, reps);
    const double t_syn = time_ms([&] { (void)transform->synthesize(target); }, reps);
    const int ref_reps = nlat <= 64 ? reps : 1;
    const double t_ra =
        time_ms([&] { (void)sl::reference::analyze_direct(field, sl::Truncation{K}); }, ref_reps);
    const double t_rs =
        time_ms([&] { (void)sl::reference::synthesize_direct(target, grid); }, ref_reps);

    // agreement between the two implementations
    const sl::SpectralField a1 = transform->analyze(field);
    const sl::SpectralField a2 = sl::reference::analyze_direct(field, sl::Truncation{K});
    double max_err = 0.0;
    for (size_t n = 0; n < a1.coeffs.size(); ++n)
      max_err = std::max(max_err, std::abs(a1.coeffs[n] - a2.coeffs[n]));

    std::printf("%6d %6d %5d | %12.3f %12.3f %12.3f %12.3f | %9.2e\n", nlat, nlon, K, t_ana,
                t_syn, t_ra, t_rs, max_err);
  }
  return 0;
}

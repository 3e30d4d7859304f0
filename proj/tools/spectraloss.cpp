// spectraloss: spectral loss functions and forecast-verification toolkit CLI.
#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>

#include "spectraloss/csvfmt.hpp"
#include "spectraloss/diagnostics.hpp"
#include "spectraloss/ensemble.hpp"
#include "spectraloss/errors.hpp"
#include "spectraloss/io.hpp"
#include "spectraloss/loss.hpp"
#include "spectraloss/qq.hpp"
#include "spectraloss/rng.hpp"
#include "spectraloss/sht.hpp"
#include "spectraloss/toy_train.hpp"

namespace sl = spectraloss;

namespace {

constexpr std::uint64_t kDefaultSeed = 12345;

bool has_ext(const std::string& path, const char* ext) {
  const size_t n = std::strlen(ext);
  return path.size() >= n && path.compare(path.size() - n, n, ext) == 0;
}

// stdout unless an output path was given
class OutStream {
 public:
  explicit OutStream(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw sl::io_error("cannot open for writing: " + path);
    }
  }
  std::ostream& get() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

sl::SpectralField load_spectral_any(const std::string& path, int trunc) {
  if (has_ext(path, ".scf")) return sl::read_spectral(path);
  if (trunc < 0)
    throw sl::parameter_error("--trunc is required for gridded input " + path);
  return sl::analyze(sl::read_field(path), sl::Truncation{trunc});
}

std::vector<double> load_sample(const std::string& path) {
  if (has_ext(path, ".sgf") || has_ext(path, ".csv")) {
    return sl::read_field(path).values;
  }
  std::ifstream f(path);
  if (!f) throw sl::io_error("cannot open: " + path);
  std::vector<double> out;
  double v;
  while (f >> v) out.push_back(v);
  if (out.empty()) throw sl::format_error(path + ": no numeric samples");
  return out;
}

sl::SyntheticSpec make_spec(int trunc, double slope, double rho_const, bool rho_exp,
                            std::uint64_t seed) {
  sl::SyntheticSpec spec;
  spec.K = trunc;
  spec.slope = slope;
  spec.seed = seed;
  spec.rho = rho_exp ? sl::rho_profile_exp(trunc) : sl::rho_profile_const(trunc, rho_const);
  return spec;
}

std::string opt_to_string(const std::optional<int>& k) {
  return k ? std::to_string(*k) : std::string("none");
}

int run_cli(int argc, char** argv) {
  CLI::App app{"spectral loss functions and forecast verification at desk scale"};
  app.require_subcommand(1);
  int exit_code = 0;
  std::function<void()> action;

  // ---- gen ----------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "generate synthetic band-limited fields");
  {
    static int nlat = 64, nlon = 128, trunc = 42;
    static double slope = 3.0, rho = 1.0;
    static std::uint64_t seed = kDefaultSeed;
    static std::string out, pair_out;
    gen->add_option("--nlat", nlat);
    gen->add_option("--nlon", nlon);
    gen->add_option("--trunc", trunc);
    gen->add_option("--slope", slope, "spectral slope p in PSD_k ~ (1+k)^-p");
    gen->add_option("--rho", rho, "correlation of the paired field");
    gen->add_option("--seed", seed);
    gen->add_option("--out", out, "target field path (.sgf or .csv)")->required();
    gen->add_option("--pair-out", pair_out, "correlated forecast field path");
    gen->callback([&] {
      action = [&] {
        const sl::Grid grid = sl::make_gaussian_grid(nlat, nlon);
        sl::check_admissible(grid, sl::Truncation{trunc});
        const sl::SyntheticSpec spec = make_spec(trunc, slope, rho, false, seed);
        auto [input, target] = sl::sample_pair(spec);
        sl::write_field(sl::synthesize(target, grid), out);
        if (!pair_out.empty()) sl::write_field(sl::synthesize(input, grid), pair_out);
      };
    });
  }

  // ---- analyze / synth ----------------------------------------------------
  auto* ana = app.add_subcommand("analyze", "spherical-harmonic analysis of a field");
  {
    static std::string in, out;
    static int trunc = 42;
    ana->add_option("input", in)->required();
    ana->add_option("--trunc", trunc);
    ana->add_option("--out", out, "spectral output (.scf)")->required();
    ana->callback([&] {
      action = [&] {
        sl::write_spectral(sl::analyze(sl::read_field(in), sl::Truncation{trunc}), out);
      };
    });
  }
  auto* syn = app.add_subcommand("synth", "synthesize a field from spectral coefficients");
  {
    static std::string in, out, kind = "gaussian";
    static int nlat = 64, nlon = 128;
    syn->add_option("input", in)->required();
    syn->add_option("--nlat", nlat);
    syn->add_option("--nlon", nlon);
    syn->add_option("--kind", kind)->check(CLI::IsMember({"gaussian", "equiangular"}));
    syn->add_option("--out", out)->required();
    syn->callback([&] {
      action = [&] {
        const sl::Grid grid = kind == "gaussian" ? sl::make_gaussian_grid(nlat, nlon)
                                                 : sl::make_equiangular_grid(nlat, nlon);
        sl::write_field(sl::synthesize(sl::read_spectral(in), grid), out);
      };
    });
  }

  // ---- spectrum -----------------------------------------------------------
  auto* spe = app.add_subcommand("spectrum", "per-wavenumber power spectral density");
  {
    static std::string in, out;
    static int trunc = -1;
    spe->add_option("input", in)->required();
    spe->add_option("--trunc", trunc);
    spe->add_option("--out", out);
    spe->callback([&] {
      action = [&] {
        const sl::SpectralField x = load_spectral_any(in, trunc);
        const auto shells = sl::shell_powers(x, x);
        OutStream os(out);
        os.get() << "k,psd\n";
        for (size_t k = 0; k < shells.size(); ++k)
          os.get() << k << ',' << sl::fmt_full(shells[k].px) << '\n';
      };
    });
  }

  // ---- compare ------------------------------------------------------------
  auto* cmp = app.add_subcommand("compare", "per-wavenumber diagnostics of two fields");
  {
    static std::string in_x, in_y, out, res_out;
    static int trunc = -1;
    static double threshold = 0.75;
    cmp->add_option("x", in_x)->required();
    cmp->add_option("y", in_y)->required();
    cmp->add_option("--trunc", trunc);
    cmp->add_option("--out", out);
    cmp->add_option("--resolution-out", res_out, "effective-resolution CSV");
    cmp->add_option("--energy-threshold", threshold, "dissipation energy fraction");
    cmp->callback([&] {
      action = [&] {
        const sl::SpectralField x = load_spectral_any(in_x, trunc);
        const sl::SpectralField y = load_spectral_any(in_y, trunc);
        const sl::SpectralDiagnostics diag = sl::diagnostics(x, y);
        OutStream os(out);
        sl::write_diagnostics_csv(diag, os.get());
        const auto kd =
            sl::effective_resolution(diag, sl::ResolutionMode::dissipation, threshold);
        const auto kn = sl::effective_resolution(diag, sl::ResolutionMode::noise);
        std::cerr << "resolution_dissipation=" << opt_to_string(kd) << '\n'
                  << "resolution_noise=" << opt_to_string(kn) << '\n';
        if (!res_out.empty()) {
          std::ofstream rf(res_out);
          if (!rf) throw sl::io_error("cannot open for writing: " + res_out);
          rf << "mode,k\ndissipation," << opt_to_string(kd) << "\nnoise," << opt_to_string(kn)
             << '\n';
        }
      };
    });
  }

  // ---- loss ---------------------------------------------------------------
  auto* los = app.add_subcommand("loss", "loss value between field pairs");
  {
    static std::string kind = "amse", in_x, in_y, weights_path, breakdown;
    static std::vector<std::string> xs, ys;
    static int trunc = -1;
    static double dec_weight = 1.0;
    los->add_option("--kind", kind)->check(CLI::IsMember({"mse", "amse", "mae"}));
    los->add_option("x", in_x);
    los->add_option("y", in_y);
    los->add_option("--var-x", xs, "per-variable fields (with --weights)");
    los->add_option("--var-y", ys, "per-variable fields (with --weights)");
    los->add_option("--weights", weights_path, "variable weighting config");
    los->add_option("--trunc", trunc);
    los->add_option("--dec-weight", dec_weight, "relative weight of the decoherence term");
    los->add_option("--breakdown", breakdown, "per-k amplitude/decoherence CSV");
    los->callback([&] {
      action = [&] {
        const sl::LossKind lk = sl::loss_kind_from_string(kind);
        if (!weights_path.empty()) {
          const sl::VariableWeighting w = sl::parse_weighting(weights_path);
          std::vector<sl::GridField> fx, fy;
          for (const auto& p : xs) fx.push_back(sl::read_field(p));
          for (const auto& p : ys) fy.push_back(sl::read_field(p));
          const double total =
              sl::weighted_multivariable_loss(fx, fy, w, lk, sl::Truncation{trunc});
          std::cout << "kind,total\n" << kind << ',' << sl::fmt_full(total) << '\n';
          return;
        }
        if (in_x.empty() || in_y.empty())
          throw sl::parameter_error("loss: provide positional x y or --weights with --var-x/--var-y");
        double total;
        sl::LossBreakdown bd;
        if (lk == sl::LossKind::mae) {
          total = sl::mae(sl::read_field(in_x), sl::read_field(in_y));
        } else {
          const sl::SpectralField x = load_spectral_any(in_x, trunc);
          const sl::SpectralField y = load_spectral_any(in_y, trunc);
          bd = (lk == sl::LossKind::amse) ? sl::amse(x, y, dec_weight) : sl::mse(x, y);
          total = bd.total;
        }
        std::cout << "kind,total\n" << kind << ',' << sl::fmt_full(total) << '\n';
        if (!breakdown.empty() && lk != sl::LossKind::mae) {
          std::ofstream bf(breakdown);
          if (!bf) throw sl::io_error("cannot open for writing: " + breakdown);
          bf << "k,amplitude,decoherence\n";
          for (size_t k = 0; k < bd.per_k_amplitude.size(); ++k)
            bf << k << ',' << sl::fmt_full(bd.per_k_amplitude[k]) << ','
               << sl::fmt_full(bd.per_k_decoherence[k]) << '\n';
        }
      };
    });
  }

  // ---- gradcheck ----------------------------------------------------------
  auto* grc = app.add_subcommand("gradcheck", "finite-difference check of the AMSE gradient");
  {
    static int trunc = 10, nlat = 0, nlon = 0, triples = 20;
    static double h = 1e-5, rho = 0.5;
    static std::uint64_t seed = kDefaultSeed;
    grc->add_option("--trunc", trunc);
    grc->add_option("--nlat", nlat);
    grc->add_option("--nlon", nlon);
    grc->add_option("--triples", triples);
    grc->add_option("--step", h, "central-difference step");
    grc->add_option("--rho", rho);
    grc->add_option("--seed", seed);
    grc->callback([&] {
      action = [&] {
        const int la = nlat > 0 ? nlat : std::max(16, trunc + 2);
        const int lo = nlon > 0 ? nlon : std::max(32, 2 * la);
        const sl::Grid grid = sl::make_gaussian_grid(la, lo);
        sl::check_admissible(grid, sl::Truncation{trunc});
        sl::Rng rng(seed);
        const sl::SyntheticSpec spec = make_spec(trunc, 1.0, rho, false, seed);
        double max_rel = 0.0;
        for (int t = 0; t < triples; ++t) {
          auto [input, target] = sl::sample_pair(spec, rng);
          sl::GridField xg = sl::synthesize(input, grid);
          const sl::SpectralField y = target;
          sl::GridField dir = sl::make_field(grid);
          for (auto& v : dir.values) v = rng.gaussian();
          const sl::GridField grad =
              sl::amse_gradient(sl::analyze(xg, sl::Truncation{trunc}), y, grid);
          double dot = 0.0, g2 = 0.0, d2 = 0.0;
          for (size_t n = 0; n < grad.values.size(); ++n) {
            dot += grad.values[n] * dir.values[n];
            g2 += grad.values[n] * grad.values[n];
            d2 += dir.values[n] * dir.values[n];
          }
          sl::GridField xp = xg, xm = xg;
          for (size_t n = 0; n < xg.values.size(); ++n) {
            xp.values[n] += h * dir.values[n];
            xm.values[n] -= h * dir.values[n];
          }
          const double fp = sl::amse(sl::analyze(xp, sl::Truncation{trunc}), y).total;
          const double fm = sl::amse(sl::analyze(xm, sl::Truncation{trunc}), y).total;
          const double fd = (fp - fm) / (2.0 * h);
          const double scale = std::max(std::abs(fd), 0.01 * std::sqrt(g2 * d2));
          max_rel = std::max(max_rel, std::abs(fd - dot) / scale);
        }
        std::cout << "max_rel_error\n" << sl::fmt_full(max_rel) << '\n';
        if (max_rel > 1e-6) throw sl::shape_error("gradient check failed");
      };
    });
  }

  // ---- filter ---------------------------------------------------------------
  auto* fil = app.add_subcommand("filter", "fourth-order spectral high-pass");
  {
    static std::string in, out;
    static double k0 = 50.0;
    static int trunc = -1;
    fil->add_option("input", in)->required();
    fil->add_option("--k0", k0, "cutoff wavenumber");
    fil->add_option("--trunc", trunc);
    fil->add_option("--out", out)->required();
    fil->callback([&] {
      action = [&] {
        if (has_ext(in, ".scf")) {
          sl::write_spectral(sl::highpass(sl::read_spectral(in), k0), out);
        } else {
          const sl::GridField f = sl::read_field(in);
          if (trunc < 0) throw sl::parameter_error("--trunc is required for gridded input");
          const sl::SpectralField s = sl::analyze(f, sl::Truncation{trunc});
          sl::write_field(sl::synthesize(sl::highpass(s, k0), f.grid), out);
        }
      };
    });
  }

  // ---- ensemble -----------------------------------------------------------
  auto* ens = app.add_subcommand("ensemble", "ensemble construction and scores");
  ens->require_subcommand(1);

  auto* esc = ens->add_subcommand("score", "score one ensemble");
  {
    static std::vector<std::string> members;
    static std::string verif;
    static bool paper_sign = false;
    esc->add_option("--member", members)->required();
    esc->add_option("--verif", verif)->required();
    esc->add_flag("--paper-sign", paper_sign, "use the printed '+' spread sign");
    esc->callback([&] {
      action = [&] {
        sl::EnsembleSet e;
        for (const auto& m : members) e.members.push_back(sl::read_field(m));
        e.verification = sl::read_field(verif);
        std::cout << "crps,ermse,ser,ubermse\n"
                  << sl::fmt_full(sl::fair_crps(e, paper_sign)) << ','
                  << sl::fmt_full(sl::ermse(e)) << ',' << sl::fmt_full(sl::ser(e)) << ','
                  << sl::fmt_full(sl::ub_ermse(e).value) << '\n';
      };
    });
  }

  auto* ela = ens->add_subcommand("lagged", "build and score lagged ensembles from an archive");
  {
    static std::string root, out;
    static int window = 9, stride = 12;
    static bool paper_sign = false;
    ela->add_option("--archive", root)->required();
    ela->add_option("--window", window);
    ela->add_option("--stride-hours", stride);
    ela->add_flag("--paper-sign", paper_sign);
    ela->add_option("--out", out);
    ela->callback([&] {
      action = [&] {
        const sl::LaggedBuildResult built = sl::build_lagged_ensembles(root, window, stride);
        sl::ScoreSeries series;
        for (const auto& e : built.ensembles) series.rows.push_back(sl::score_ensemble(e, paper_sign));
        std::sort(series.rows.begin(), series.rows.end(), [](const auto& a, const auto& b) {
          return a.valid_time != b.valid_time ? a.valid_time < b.valid_time
                                              : a.lead_hours < b.lead_hours;
        });
        OutStream os(out);
        sl::write_scores_csv(series, os.get());
        std::cerr << "ensembles=" << built.ensembles.size() << " skipped=" << built.skipped
                  << '\n';
      };
    });
  }

  auto* esg = ens->add_subcommand("significance", "bootstrap score differences of two series");
  {
    static std::string path_a, path_b;
    static double fraction = 1.0 / 3.0;
    static int resamples = 1000;
    static std::uint64_t seed = kDefaultSeed;
    esg->add_option("--a", path_a)->required();
    esg->add_option("--b", path_b)->required();
    esg->add_option("--fraction", fraction);
    esg->add_option("--resamples", resamples);
    esg->add_option("--seed", seed);
    esg->callback([&] {
      action = [&] {
        const auto sig = sl::bootstrap_significance(sl::read_scores_csv(path_a),
                                                    sl::read_scores_csv(path_b), fraction,
                                                    resamples, seed);
        std::cout << "score,mean_diff,lo90,hi90,significant\n";
        for (const auto& s : sig)
          std::cout << s.score << ',' << sl::fmt_full(s.mean_diff) << ',' << sl::fmt_full(s.lo90)
                    << ',' << sl::fmt_full(s.hi90) << ',' << (s.significant ? 1 : 0) << '\n';
      };
    });
  }

  // ---- qq -------------------------------------------------------------------
  auto* qqc = app.add_subcommand("qq", "quantile-quantile statistics with a KS band");
  {
    static std::string in_x, in_y, out, plist;
    qqc->add_option("--x", in_x)->required();
    qqc->add_option("--y", in_y)->required();
    qqc->add_option("--percentiles", plist, "comma-separated probabilities in (0,1)");
    qqc->add_option("--out", out);
    qqc->callback([&] {
      action = [&] {
        std::vector<double> probs;
        if (plist.empty()) {
          probs = {0.01, 0.02, 0.05, 0.10, 0.25, 0.50, 0.75, 0.90, 0.95, 0.98, 0.99};
        } else {
          std::istringstream ss(plist);
          std::string tok;
          while (std::getline(ss, tok, ',')) probs.push_back(std::stod(tok));
        }
        const sl::QQResult r = sl::qq(load_sample(in_x), load_sample(in_y), probs);
        OutStream os(out);
        sl::write_qq_csv(r, os.get());
      };
    });
  }

  // ---- klstudy ----------------------------------------------------------------
  auto* kls = app.add_subcommand("klstudy", "KL-divergence optimum of the scalar model");
  {
    static double rho = 0.4, lo = 0.0, hi = 0.0, step = 0.05;
    kls->add_option("--rho", rho);
    kls->add_option("--sweep-lo", lo);
    kls->add_option("--sweep-hi", hi);
    kls->add_option("--sweep-step", step);
    kls->callback([&] {
      action = [&] {
        std::vector<std::pair<double, sl::KLOptimum>> rows;
        if (hi > lo) {
          for (double r = lo; r <= hi + 1e-12; r += step) rows.emplace_back(r, sl::kl_optimum(r));
        } else {
          rows.emplace_back(rho, sl::kl_optimum(rho));
        }
        std::cout << "rho,optimal_ratio,objective\n";
        for (const auto& [r, o] : rows)
          std::cout << sl::fmt_full(r) << ',' << sl::fmt_full(o.optimal_sigma_ratio) << ','
                    << sl::fmt_full(o.objective_value) << '\n';
      };
    });
  }

  // ---- demo train ---------------------------------------------------------
  auto* demo = app.add_subcommand("demo", "desk-scale demonstrations");
  demo->require_subcommand(1);
  auto* dtr = demo->add_subcommand("train", "train the diagonal-gain toy model");
  {
    static int trunc = 42, steps = 500, batch = 32, emit_every = 1;
    static double slope = 0.0, rho_const = 0.5, lr0 = 20.0, lr_final = 0.5, ema = 0.995;
    static double dec_weight = 1.0;
    static bool rho_exp = false;
    static std::string kind = "mse", out, gains_out;
    static std::uint64_t seed = kDefaultSeed;
    dtr->add_option("--trunc", trunc);
    dtr->add_option("--slope", slope);
    auto* rho_opt = dtr->add_option("--rho", rho_const, "constant predictability profile");
    dtr->add_flag("--rho-exp", rho_exp,
                  "rho_k = exp(-k/K), the default when --rho is not given");
    dtr->add_option("--loss", kind)->check(CLI::IsMember({"mse", "amse", "mae"}));
    dtr->add_option("--steps", steps);
    dtr->add_option("--batch", batch);
    dtr->add_option("--lr0", lr0);
    dtr->add_option("--lr-final", lr_final);
    dtr->add_option("--ema-beta", ema);
    dtr->add_option("--emit-every", emit_every);
    dtr->add_option("--dec-weight", dec_weight);
    dtr->add_option("--seed", seed);
    dtr->add_option("--out", out, "trajectory CSV");
    dtr->add_option("--gains-out", gains_out, "final per-k gain CSV");
    dtr->callback([&, rho_opt] {
      action = [&, rho_opt] {
        const bool use_exp = rho_exp || rho_opt->count() == 0;
        const sl::SyntheticSpec spec = make_spec(trunc, slope, rho_const, use_exp, seed);
        sl::TrainConfig cfg;
        cfg.kind = sl::loss_kind_from_string(kind);
        cfg.steps = steps;
        cfg.batch = batch;
        cfg.lr0 = lr0;
        cfg.lr_final = lr_final;
        cfg.seed = seed;
        cfg.ema_beta = ema;
        cfg.emit_every = emit_every;
        cfg.dec_weight = dec_weight;
        const sl::TrainResult r = sl::train(spec, cfg);
        OutStream os(out);
        sl::emit_fig2_analog(r.trajectory, os.get());
        if (!gains_out.empty()) {
          std::ofstream gf(gains_out);
          if (!gf) throw sl::io_error("cannot open for writing: " + gains_out);
          gf << "k,gain\n";
          for (size_t k = 0; k < r.model.g.size(); ++k)
            gf << k << ',' << sl::fmt_full(r.model.g[k]) << '\n';
        }
      };
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }

  try {
    action();
  } catch (const sl::parameter_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
#ifdef _OPENMP
  if (const char* env = std::getenv("SPECTRALOSS_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) omp_set_num_threads(n);
  }
#endif
  return run_cli(argc, argv);
}

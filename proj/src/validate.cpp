#include "ldnoma/validate.hpp"

#include "ldnoma/cavity.hpp"
#include "ldnoma/graphgen.hpp"
#include "ldnoma/parallel.hpp"
#include "ldnoma/quadrature.hpp"
#include "ldnoma/throughput.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>

namespace ldnoma {

double sign_flipped_density(double lambda, const DensityParams& p) {
  return -analytic_density(lambda, p);
}

namespace {

struct Outcome {
  bool passed;
  std::string detail;
};

using Check = std::function<Outcome(const ValidationContext&)>;

SpectralLaw law_of(const ValidationContext& ctx, const DensityParams& p) {
  auto density = ctx.density;
  return SpectralLaw{p.lambda_minus, p.lambda_plus,
                     [density, p](double lambda) { return density(lambda, p); }};
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(4);
  os << std::scientific << x;
  return os.str();
}

Outcome kesten_mckay_identity(const ValidationContext& ctx) {
  double worst = 0.0;
  for (const double d : {2.0, 3.0, 10.0}) {
    const auto p = DensityParams::make(1.0, d);
    for (int i = 1; i <= 1000; ++i) {
      const double lambda = p.lambda_plus * i / 1001.0;
      worst = std::max(worst, std::abs(ctx.density(lambda, p) - kesten_mckay_density(lambda, d)));
    }
  }
  return {worst < 1e-12, "max abs diff " + fmt(worst)};
}

Outcome normalization(const ValidationContext& ctx) {
  double worst_mass = 0.0, worst_mean = 0.0;
  for (const double beta : {1.0, 1.5, 2.0, 3.0}) {
    for (const double d : {2.0, 3.0, 4.0, 10.0}) {
      const auto p = DensityParams::make(beta, d);
      const auto law = law_of(ctx, p);
      const double mass = integrate_sqrt_edges(law.density, law.lo, law.hi).value;
      const double mean =
          integrate_sqrt_edges([&](double l) { return l * law.density(l); }, law.lo, law.hi).value;
      worst_mass = std::max(worst_mass, std::abs(mass - 1.0));
      worst_mean = std::max(worst_mean, std::abs(mean - beta));
    }
  }
  return {worst_mass < 1e-8 && worst_mean < 1e-6,
          "max |mass-1| " + fmt(worst_mass) + ", max |mean-beta| " + fmt(worst_mean)};
}

Outcome positivity(const ValidationContext& ctx) {
  for (const double beta : {1.0, 1.5, 2.0, 3.0}) {
    for (const double d : {2.0, 3.0, 4.0, 10.0}) {
      const auto p = DensityParams::make(beta, d);
      for (int i = 0; i <= 400; ++i) {
        const double lambda = p.lambda_minus - 0.5 + (p.lambda_plus - p.lambda_minus + 1.0) * i / 400.0;
        const double v = ctx.density(lambda, p);
        const bool inside = lambda > p.lambda_minus && lambda < p.lambda_plus;
        if (v < 0.0 || (!inside && v != 0.0)) {
          return {false, "violation at beta=" + fmt(beta) + " d=" + fmt(d) + " lambda=" + fmt(lambda)};
        }
      }
    }
  }
  return {true, "density >= 0 and zero off-support on the test grid"};
}

double mp_distance(const ValidationContext& ctx, double beta, double d) {
  const auto p = DensityParams::make(beta, d);
  const double top = std::max(p.lambda_plus, std::pow(1.0 + std::sqrt(beta), 2)) + 0.1;
  double worst = 0.0;
  for (int i = 0; i <= 4000; ++i) {
    const double lambda = top * i / 4000.0;
    worst = std::max(worst, std::abs(ctx.density(lambda, p) - marchenko_pastur_density(lambda, beta)));
  }
  return worst;
}

Outcome marchenko_pastur_limit(const ValidationContext& ctx) {
  std::string detail;
  double prev = INFINITY;
  bool monotone = true;
  double last = 0.0;
  for (const double d : {2.0, 4.0, 10.0, 40.0, 1000.0}) {
    last = mp_distance(ctx, 1.5, d);
    monotone = monotone && last < prev;
    prev = last;
    detail += (detail.empty() ? "" : ", ") + std::string("d=") + fmt(d) + ":" + fmt(last);
  }
  return {monotone && last < 1e-2, detail};
}

Outcome scalar_cavity(const ValidationContext& ctx) {
  const auto p = DensityParams::make(1.5, 2.0);
  std::vector<double> grid(512);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid[i] = p.lambda_minus + (p.lambda_plus - p.lambda_minus) * static_cast<double>(i) / 511.0;
  }
  const auto pts = stieltjes_inversion(grid, p, 1e-6, 1e-13, ctx.threads);
  double worst = 0.0;
  for (const auto& pt : pts) {
    if (pt.lambda < p.lambda_minus + 1e-3 || pt.lambda > p.lambda_plus - 1e-3) continue;
    if (!pt.converged) return {false, pt.error};
    worst = std::max(worst, std::abs(pt.density - ctx.density(pt.lambda, p)));
  }
  return {worst < 1e-3, "sup error " + fmt(worst)};
}

Outcome herglotz(const ValidationContext&) {
  for (const double beta : {1.0, 1.5, 3.0}) {
    for (const double d : {2.0, 4.0}) {
      const auto p = DensityParams::make(beta, d);
      for (const double eps : {1e-1, 1e-3, 1e-6}) {
        for (int i = 0; i <= 100; ++i) {
          const double lambda = p.lambda_minus - 0.5 + (p.lambda_plus - p.lambda_minus + 1.0) * i / 100.0;
          const auto st = solve_fixed_point({lambda, eps}, p, 1e-12);
          if (st.delta_tilde.imag() > 0.0 || st.delta.imag() > 0.0) {
            return {false, "Im > 0 at lambda=" + fmt(lambda)};
          }
        }
      }
    }
  }
  return {true, "Im Delta, Im Delta~ <= 0 on the test grid"};
}

Outcome sampler_degrees(const ValidationContext& ctx) {
  const EnsembleSpec specs[] = {
      {100, 150, 2, EntryMode::Rademacher, ctx.seed},
      {60, 120, 3, EntryMode::Ones, ctx.seed},
      {50, 50, 4, EntryMode::Rademacher, ctx.seed},
  };
  for (const auto& spec : specs) {
    for (std::uint64_t r = 0; r < 20; ++r) {
      if (!generate_regular(spec, r).is_biregular()) return {false, "degree violation"};
    }
  }
  return {true, "60 realizations biregular and simple"};
}

Outcome small_snr_slope(const ValidationContext& ctx) {
  const double snr = 1e-6;
  const double beta = 1.5;
  const double target = beta / (2.0 * std::numbers::ln2);
  const double regular = law_throughput(snr, law_of(ctx, DensityParams::make(beta, 2.0))) / snr;
  const double dense = dense_rs_throughput(snr, beta) / snr;
  const double err = std::max(std::abs(regular / target - 1.0), std::abs(dense / target - 1.0));
  return {err < 1e-3, "max relative error " + fmt(err)};
}

Outcome ordering(const ValidationContext& ctx) {
  const double target = db_to_linear(10.0);
  for (const double beta : {1.0, 1.5, 2.0, 2.5, 3.0}) {
    const auto law = law_of(ctx, DensityParams::make(beta, 2.0));
    const auto cap = [&](double s) { return law_throughput(s, law); };
    const double reg = cap(snr_for_ebno(target, beta, cap));
    const double dense = dense_rs_throughput(snr_for_ebno(target, beta, std::nullopt), beta);
    const auto cw_cap = [&](double s) { return cover_wyner_bound(s, beta); };
    const double cw = cw_cap(snr_for_ebno(target, beta, cw_cap));
    if (!(reg > dense && cw >= reg && cw >= dense)) {
      return {false, "ordering fails at beta=" + fmt(beta)};
    }
  }
  return {true, "cover_wyner >= regular > dense_rs for beta in {1,...,3}"};
}

Outcome quadrature_vs_mc(const ValidationContext& ctx) {
  const EnsembleSpec spec{200, 300, 2, EntryMode::Rademacher, ctx.seed};
  const double snr = 10.0;
  const auto est = finite_n_throughput_mc(spec, snr, 100, Ensemble::Regular, ctx.threads);
  const double c = law_throughput(snr, law_of(ctx, DensityParams::make(1.5, 2.0)));
  const double diff = std::abs(est.mean - c);
  return {diff < 3.0 * est.std_error + 0.01,
          "|mc - C| = " + fmt(diff) + ", stderr " + fmt(est.std_error)};
}

std::vector<SpectrumSample> spectra(const EnsembleSpec& spec, std::size_t realizations,
                                    unsigned threads) {
  std::vector<SpectrumSample> out(realizations);
  parallel_for(realizations, threads, [&](std::size_t r) {
    out[r] = empirical_spectrum(generate_regular(spec, r), r);
  });
  return out;
}

Outcome spectrum_ks(const ValidationContext& ctx, std::size_t n, std::size_t realizations,
                    bool both_modes) {
  const auto p = DensityParams::make(1.5, 2.0);
  const auto law = law_of(ctx, p);
  EnsembleSpec spec{n, n * 3 / 2, 2, EntryMode::Rademacher, ctx.seed};
  const auto rad = pool_eigenvalues(spectra(spec, realizations, ctx.threads), true);
  const double ks_rad = ks_statistic(rad, law);
  std::string detail = "KS(rademacher) " + fmt(ks_rad);
  bool ok = ks_rad < 0.02;
  if (both_modes) {
    spec.entry_mode = EntryMode::Ones;
    const auto ones = pool_eigenvalues(spectra(spec, realizations, ctx.threads), true);
    const double ks_ones = ks_statistic(ones, law);
    const double ks_modes = ks_two_sample(ones, rad);
    detail += ", KS(ones) " + fmt(ks_ones) + ", KS(ones vs rademacher) " + fmt(ks_modes);
    ok = ok && ks_ones < 0.02 && ks_modes < 0.02;
  }
  return {ok, detail};
}

Outcome graph_cavity(const ValidationContext& ctx) {
  const auto p = DensityParams::make(1.5, 2.0);
  const auto a = generate_regular({1000, 1500, 2, EntryMode::Rademacher, ctx.seed});
  std::vector<double> grid;
  for (int i = 1; i <= 64; ++i) {
    grid.push_back(p.lambda_minus + (p.lambda_plus - p.lambda_minus) * i / 65.0);
  }
  const auto pts = graph_density(a, grid, 1e-3);
  double worst = 0.0;
  for (const auto& pt : pts) {
    if (!pt.converged) return {false, pt.error};
    worst = std::max(worst, std::abs(pt.density - ctx.density(pt.lambda, p)));
  }
  return {worst < 0.05, "sup error " + fmt(worst)};
}

Outcome finite_n_mc(const ValidationContext& ctx) {
  const double beta = 1.5;
  const auto law = law_of(ctx, DensityParams::make(beta, 2.0));
  const auto cap = [&](double s) { return law_throughput(s, law); };
  std::vector<double> snrs, caps;
  for (const double db : {4.0, 7.0, 10.0, 13.0}) {
    snrs.push_back(snr_for_ebno(db_to_linear(db), beta, cap));
    caps.push_back(cap(snrs.back()));
  }
  const auto est = finite_n_throughput_mc({10, 15, 2, EntryMode::Rademacher, ctx.seed}, snrs,
                                          10000, Ensemble::Regular, ctx.threads);
  double worst = 0.0;
  for (std::size_t i = 0; i < snrs.size(); ++i) {
    worst = std::max(worst, std::abs(est[i].mean - caps[i]) / caps[i]);
  }
  return {worst < 0.05, "max relative error " + fmt(worst)};
}

Outcome regular_vs_irregular(const ValidationContext& ctx) {
  const EnsembleSpec spec{200, 300, 2, EntryMode::Rademacher, ctx.seed};
  const double snr = db_to_linear(10.0);
  const auto reg = finite_n_throughput_mc(spec, snr, 200, Ensemble::Regular, ctx.threads);
  const auto irr = finite_n_throughput_mc(spec, snr, 200, Ensemble::Irregular, ctx.threads);
  const double pooled = std::hypot(reg.std_error, irr.std_error);
  const double gap = reg.mean - irr.mean;
  return {gap > 5.0 * pooled, "gap " + fmt(gap) + ", pooled stderr " + fmt(pooled)};
}

} // namespace

std::vector<CheckResult> run_validation(ValidationLevel level, const ValidationContext& ctx,
                                        const std::function<void(const CheckResult&)>& on_result) {
  std::vector<std::pair<std::string, Check>> checks = {
      {"kesten_mckay_identity", kesten_mckay_identity},
      {"normalization_first_moment", normalization},
      {"density_positivity_support", positivity},
      {"marchenko_pastur_limit", marchenko_pastur_limit},
      {"scalar_cavity_vs_closed_form", scalar_cavity},
      {"cavity_herglotz", herglotz},
      {"regular_sampler_degrees", sampler_degrees},
      {"small_snr_slope", small_snr_slope},
      {"throughput_ordering_10dB", ordering},
      {"quadrature_vs_mc_n200", quadrature_vs_mc},
  };
  if (level == ValidationLevel::Fast) {
    checks.emplace_back("spectrum_ks_n520_50", [](const ValidationContext& c) {
      return spectrum_ks(c, 520, 50, false);
    });
  } else {
    checks.emplace_back("spectrum_ks_n520_200_both_modes", [](const ValidationContext& c) {
      return spectrum_ks(c, 520, 200, true);
    });
    checks.emplace_back("graph_cavity_n1000", graph_cavity);
    checks.emplace_back("finite_n_mc_n10", finite_n_mc);
    checks.emplace_back("regular_vs_irregular_n200", regular_vs_irregular);
    checks.emplace_back("spectrum_ks_n2600", [](const ValidationContext& c) {
      return spectrum_ks(c, 2600, c.full_size_realizations, false);
    });
  }

  std::vector<CheckResult> results;
  for (const auto& [name, check] : checks) {
    CheckResult r;
    r.name = name;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const auto o = check(ctx);
      r.passed = o.passed;
      r.detail = o.detail;
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (on_result) on_result(r);
    results.push_back(std::move(r));
  }
  return results;
}

} // namespace ldnoma

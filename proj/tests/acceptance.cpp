// One line per acceptance criterion; exit status is nonzero if any fails.

#include "ldnoma/cavity.hpp"
#include "ldnoma/graphgen.hpp"
#include "ldnoma/parallel.hpp"
#include "ldnoma/quadrature.hpp"
#include "ldnoma/spectra.hpp"
#include "ldnoma/throughput.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace ldnoma;

namespace {

struct Verdict {
  bool passed;
  std::string detail;
};

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(4);
  os << std::scientific << x;
  return os.str();
}

unsigned worker_count() { return std::max(1u, std::thread::hardware_concurrency()); }

// Midpoint rule in theta for lambda = lo + (hi - lo) sin^2 theta; a second,
// independent estimate of integrals against edge-singular densities.
double midpoint_theta(const std::function<double(double)>& f, double lo, double hi, int n) {
  const double h = 0.5 * std::numbers::pi / n;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double theta = (i + 0.5) * h;
    const double s = std::sin(theta), c = std::cos(theta);
    sum += f(lo + (hi - lo) * s * s) * 2.0 * (hi - lo) * s * c;
  }
  return sum * h;
}

Verdict kesten_mckay() {
  double worst = 0.0;
  for (double d : {2.0, 3.0, 10.0}) {
    const auto p = DensityParams::make(1.0, d);
    for (int i = 1; i <= 1000; ++i) {
      const double lambda = p.lambda_plus * i / 1001.0;
      worst = std::max(worst, std::abs(analytic_density(lambda, p) - kesten_mckay_density(lambda, d)));
    }
  }
  return {worst < 1e-12, "max |rho - KM| = " + fmt(worst)};
}

Verdict normalization() {
  double mass_err = 0.0, mean_err = 0.0, cross = 0.0;
  for (double beta : {1.0, 1.5, 2.0, 3.0}) {
    for (double d : {2.0, 3.0, 4.0, 10.0}) {
      const auto p = DensityParams::make(beta, d);
      auto rho = [&](double l) { return analytic_density(l, p); };
      auto mrho = [&](double l) { return l * analytic_density(l, p); };
      const double mass = integrate_sqrt_edges(rho, p.lambda_minus, p.lambda_plus).value;
      const double mean = integrate_sqrt_edges(mrho, p.lambda_minus, p.lambda_plus).value;
      mass_err = std::max(mass_err, std::abs(mass - 1.0));
      mean_err = std::max(mean_err, std::abs(mean - beta));
      cross = std::max(cross, std::abs(midpoint_theta(rho, p.lambda_minus, p.lambda_plus, 20000) - 1.0));
    }
  }
  return {mass_err < 1e-8 && mean_err < 1e-6 && cross < 1e-8,
          "max |mass-1| = " + fmt(mass_err) + ", max |mean-beta| = " + fmt(mean_err) +
              ", midpoint cross-check " + fmt(cross)};
}

Verdict marchenko_pastur() {
  std::string detail;
  double prev = INFINITY, last = 0.0;
  bool monotone = true;
  for (double d : {2.0, 4.0, 10.0, 40.0, 1000.0}) {
    const auto p = DensityParams::make(1.5, d);
    const double top = std::max(p.lambda_plus, std::pow(1.0 + std::sqrt(1.5), 2)) + 0.1;
    double worst = 0.0;
    for (int i = 0; i <= 5000; ++i) {
      const double lambda = top * i / 5000.0;
      worst = std::max(worst, std::abs(analytic_density(lambda, p) - marchenko_pastur_density(lambda, 1.5)));
    }
    monotone = monotone && worst < prev;
    prev = last = worst;
    detail += (detail.empty() ? "" : ", ") + std::string("d=") + std::to_string(static_cast<int>(d)) + ": " + fmt(worst);
  }
  return {monotone && last < 1e-2, detail + (monotone ? " (monotone)" : " (NOT monotone)")};
}

Verdict three_routes() {
  const auto p = DensityParams::make(1.5, 2.0);
  std::vector<double> grid;
  for (int i = 0; i < 512; ++i) grid.push_back(p.lambda_minus + (p.lambda_plus - p.lambda_minus) * i / 511.0);
  const auto scalar = stieltjes_inversion(grid, p, 1e-6, 1e-13, worker_count());
  double sup_scalar = 0.0;
  for (const auto& pt : scalar) {
    if (pt.lambda < p.lambda_minus + 1e-3 || pt.lambda > p.lambda_plus - 1e-3) continue;
    if (!pt.converged) return {false, "scalar route failed: " + pt.error};
    sup_scalar = std::max(sup_scalar, std::abs(pt.density - analytic_density(pt.lambda, p)));
  }

  const auto a = generate_regular({1000, 1500, 2, EntryMode::Rademacher, 2024});
  std::vector<double> g64;
  for (int i = 1; i <= 64; ++i) g64.push_back(p.lambda_minus + (p.lambda_plus - p.lambda_minus) * i / 65.0);
  const auto graph = graph_density(a, g64, 1e-3);
  double sup_graph = 0.0;
  for (const auto& pt : graph) {
    if (!pt.converged) return {false, "graph route failed: " + pt.error};
    sup_graph = std::max(sup_graph, std::abs(pt.density - analytic_density(pt.lambda, p)));
  }
  return {sup_scalar < 1e-3 && sup_graph < 0.05,
          "scalar sup err = " + fmt(sup_scalar) + " (eps 1e-6, 512 pts), graph N=1000 sup err = " +
              fmt(sup_graph) + " (eps 1e-3, 64 pts)"};
}

std::vector<double> pooled(EntryMode mode, std::size_t realizations) {
  const EnsembleSpec spec{520, 780, 2, mode, 5};
  std::vector<SpectrumSample> s(realizations);
  parallel_for(realizations, worker_count(), [&](std::size_t r) {
    s[r] = empirical_spectrum(generate_regular(spec, r), r);
  });
  return pool_eigenvalues(s, true);
}

Verdict pooled_spectrum_ks_n520() {
  const auto law = regular_law(DensityParams::make(1.5, 2.0));
  const auto rad = pooled(EntryMode::Rademacher, 200);
  const auto ones = pooled(EntryMode::Ones, 200);
  const double ks_rad = ks_statistic(rad, law);
  const double ks_ones = ks_statistic(ones, law);
  const double ks_modes = ks_two_sample(ones, rad);
  return {ks_rad < 0.02 && ks_ones < 0.02 && ks_modes < 0.02,
          "KS rademacher = " + fmt(ks_rad) + ", KS ones = " + fmt(ks_ones) +
              ", KS ones vs rademacher = " + fmt(ks_modes) +
              " (N=2600 runs under validate --level full)"};
}

Verdict finite_n() {
  const auto p = DensityParams::make(1.5, 2.0);
  std::vector<double> snrs, caps;
  for (double db : {4.0, 7.0, 10.0, 13.0}) {
    snrs.push_back(snr_for_ebno(db_to_linear(db), 1.5, 2.0));
    caps.push_back(regular_throughput(snrs.back(), p));
  }
  const auto est = finite_n_throughput_mc({10, 15, 2, EntryMode::Rademacher, 77}, snrs, 10000,
                                          Ensemble::Regular, worker_count());
  double worst = 0.0;
  std::string detail;
  for (std::size_t i = 0; i < snrs.size(); ++i) {
    const double rel = std::abs(est[i].mean - caps[i]) / caps[i];
    worst = std::max(worst, rel);
    detail += (i ? ", " : "") + fmt(rel);
  }
  return {worst < 0.05, "relative errors at 4/7/10/13 dB: " + detail};
}

Verdict ordering() {
  const double target = db_to_linear(10.0);
  std::string detail;
  bool ok = true;
  for (double beta = 1.0; beta <= 3.0 + 1e-12; beta += 0.5) {  // beta d integer for d = 2
    const double reg = regular_throughput(snr_for_ebno(target, beta, 2.0), DensityParams::make(beta, 2.0));
    const double dense = dense_rs_throughput(snr_for_ebno(target, beta, std::nullopt), beta);
    const double cw = cover_wyner_bound(
        snr_for_ebno(target, beta, [&](double s) { return cover_wyner_bound(s, beta); }), beta);
    ok = ok && reg > dense && cw >= reg && cw >= dense;
    std::ostringstream os;
    os.precision(4);
    os << (detail.empty() ? "" : "; ") << "beta=" << beta << ": " << cw << " >= " << reg << " > " << dense;
    detail += os.str();
  }
  return {ok, detail};
}

Verdict regular_vs_irregular() {
  const EnsembleSpec spec{200, 300, 2, EntryMode::Rademacher, 31};
  const double snr = db_to_linear(10.0);
  const auto reg = finite_n_throughput_mc(spec, snr, 200, Ensemble::Regular, worker_count());
  const auto irr = finite_n_throughput_mc(spec, snr, 200, Ensemble::Irregular, worker_count());
  const double pooled_se = std::hypot(reg.std_error, irr.std_error);
  const double gap = reg.mean - irr.mean;
  return {gap > 5.0 * pooled_se && reg.trials_used == 200 && irr.trials_used == 200,
          "regular " + fmt(reg.mean) + ", irregular " + fmt(irr.mean) + ", gap " + fmt(gap) +
              " = " + fmt(gap / pooled_se) + " pooled stderr"};
}

Verdict small_snr() {
  const double snr = 1e-6;
  double worst = 0.0;
  for (double beta : {1.0, 1.5, 2.0, 3.0}) {
    const double target = beta / (2.0 * std::numbers::ln2);
    for (double d : {2.0, 3.0, 10.0}) {
      worst = std::max(worst, std::abs(regular_throughput(snr, DensityParams::make(beta, d)) / snr / target - 1.0));
    }
    worst = std::max(worst, std::abs(dense_rs_throughput(snr, beta) / snr / target - 1.0));
  }
  return {worst < 1e-3, "max relative slope error " + fmt(worst)};
}

} // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_seconds;
    std::function<Verdict()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "kesten_mckay_identity", 1.0, kesten_mckay},
      {2, "normalization_first_moment", 5.0, normalization},
      {3, "marchenko_pastur_limit", 5.0, marchenko_pastur},
      {4, "three_route_density_agreement", 120.0, three_routes},
      {5, "pooled_spectrum_ks_n520", 180.0, pooled_spectrum_ks_n520},
      {6, "finite_n_mc_match_n10", 300.0, finite_n},
      {7, "ordering_10dB", 30.0, ordering},
      {8, "regular_vs_irregular_direction", 300.0, regular_vs_irregular},
      {9, "small_snr_slope", 1.0, small_snr},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v{false, ""};
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_budget = secs < c.budget_seconds;
    const bool passed = v.passed && in_budget;
    if (!passed) ++failures;
    std::printf("[%s] %d %s: %s (%.2f s, budget %.0f s%s)\n", passed ? "PASS" : "FAIL", c.id, c.name,
                v.detail.c_str(), secs, c.budget_seconds, in_budget ? "" : ", OVER BUDGET");
    std::fflush(stdout);
  }
  std::printf("%d/%zu acceptance criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}

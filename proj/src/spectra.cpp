#include "ldnoma/spectra.hpp"

#include "ldnoma/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace ldnoma {

DensityParams DensityParams::make(double beta, double d) {
  if (!std::isfinite(beta) || !std::isfinite(d)) {
    throw std::invalid_argument("density parameters must be finite");
  }
  if (beta < 1.0) throw std::invalid_argument("load beta must be >= 1");
  if (!(d > 1.0)) throw std::invalid_argument("sparsity d must be > 1");
  DensityParams p;
  p.beta = beta;
  p.d = d;
  p.alpha = (d - 1.0) / d;
  p.gamma = (beta * d - 1.0) / d;
  const double sa = std::sqrt(p.alpha);
  const double sg = std::sqrt(p.gamma);
  p.lambda_minus = (sa - sg) * (sa - sg);
  // Summed form: at beta = 1, d = 2 it gives lambda+ = beta d exactly, which
  // keeps the cancelling 1/tau pole and the square-root edge consistent.
  p.lambda_plus = p.alpha + p.gamma + 2.0 * std::sqrt(p.alpha * p.gamma);
  return p;
}

double analytic_density(double lambda, const DensityParams& p) {
  if (!(lambda > p.lambda_minus && lambda < p.lambda_plus)) return 0.0;
  // tau = beta d - lambda, split so that it shares the rounding of
  // (lambda+ - lambda) when beta d = lambda+ (beta = 1, d = 2).
  const double upper_gap = p.lambda_plus - lambda;
  const double tau = (p.beta * p.d - p.lambda_plus) + upper_gap;
  // d tau - (xi - 1)^2 = d (lambda+ - lambda) and (xi + 1)^2 - d tau =
  // d (lambda - lambda-) with xi = d sqrt(alpha gamma); the factored form
  // avoids cancellation next to the edges.
  const double q = p.d * upper_gap * p.d * (lambda - p.lambda_minus);
  if (q <= 0.0) return 0.0;
  return p.beta / (2.0 * std::numbers::pi) * std::sqrt(q) / (tau * lambda);
}

double kesten_mckay_density(double lambda, double d) {
  const double top = 4.0 * (d - 1.0) / d;
  if (!(lambda > 0.0 && lambda < top)) return 0.0;
  return d * std::sqrt(4.0 * (d - 1.0) - d * lambda) /
         (2.0 * std::numbers::pi * (d - lambda) * std::sqrt(d * lambda));
}

double marchenko_pastur_density(double lambda, double beta) {
  const double sb = std::sqrt(beta);
  const double lo = (1.0 - sb) * (1.0 - sb);
  const double hi = (1.0 + sb) * (1.0 + sb);
  if (!(lambda > lo && lambda < hi)) return 0.0;
  return std::sqrt((lambda - lo) * (hi - lambda)) / (2.0 * std::numbers::pi * lambda);
}

SpectralLaw regular_law(const DensityParams& p) {
  return SpectralLaw{p.lambda_minus, p.lambda_plus,
                     [p](double lambda) { return analytic_density(lambda, p); }};
}

SpectralLaw marchenko_pastur_law(double beta) {
  if (beta < 1.0) throw std::invalid_argument("load beta must be >= 1");
  const double sb = std::sqrt(beta);
  return SpectralLaw{(1.0 - sb) * (1.0 - sb), (1.0 + sb) * (1.0 + sb),
                     [beta](double lambda) { return marchenko_pastur_density(lambda, beta); }};
}

double law_cdf(const SpectralLaw& law, double lambda) {
  if (lambda <= law.lo) return 0.0;
  const double upper = std::min(lambda, law.hi);
  return integrate_sqrt_edges(law.density, law.lo, law.hi, upper).value;
}

std::vector<double> law_cdf_sorted(const SpectralLaw& law, std::span<const double> sorted) {
  std::vector<double> cdf(sorted.size(), 0.0);
  const double width = law.hi - law.lo;
  if (!(width > 0.0)) return cdf;
  auto g = [&](double theta) {
    const auto [lambda, jacobian] = edge_substitution(theta, law.lo, law.hi);
    return law.density(lambda) * jacobian;
  };
  auto theta_of = [&](double x) {
    const double u = std::clamp((x - law.lo) / width, 0.0, 1.0);
    return std::asin(std::sqrt(u));
  };
  double acc = 0.0;
  double theta_prev = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double theta = theta_of(sorted[i]);
    if (theta > theta_prev) {
      acc += integrate_adaptive(g, theta_prev, theta).value;
      theta_prev = theta;
    }
    cdf[i] = acc;
  }
  return cdf;
}

double analytic_cdf(double lambda, const DensityParams& p) {
  return law_cdf(regular_law(p), lambda);
}

std::vector<double> gram_matrix(const SparseSignatureMatrix& a) {
  const std::size_t n = a.rows();
  std::vector<std::vector<const Entry*>> by_col(a.cols());
  for (const auto& e : a.entries()) by_col[e.col].push_back(&e);
  std::vector<double> g(n * n, 0.0);
  const double scale = 1.0 / static_cast<double>(a.spec().col_degree);
  for (const auto& col : by_col) {
    for (const auto* x : col) {
      for (const auto* y : col) {
        g[x->row * n + y->row] += x->value * y->value * scale;
      }
    }
  }
  return g;
}

SpectrumSample empirical_spectrum(const SparseSignatureMatrix& a, std::uint64_t realization) {
  const auto n = static_cast<Eigen::Index>(a.rows());
  const auto g = gram_matrix(a);
  const Eigen::Map<const Eigen::MatrixXd> gram(g.data(), n, n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw EigenSolverError("symmetric eigensolver did not converge for realization " +
                               std::to_string(realization),
                           realization);
  }
  SpectrumSample s;
  s.realization = realization;
  const auto& ev = solver.eigenvalues();
  s.eigenvalues.assign(ev.data(), ev.data() + ev.size());
  std::sort(s.eigenvalues.begin(), s.eigenvalues.end());
  s.trivial_flags.assign(s.eigenvalues.size(), false);
  if (a.spec().entry_mode == EntryMode::Ones && !a.irregular()) {
    const double perron = static_cast<double>(a.spec().row_degree());
    for (std::size_t i = 0; i < s.eigenvalues.size(); ++i) {
      s.trivial_flags[i] = std::abs(s.eigenvalues[i] - perron) < 1e-6;
    }
  }
  return s;
}

std::vector<double> pool_eigenvalues(std::span<const SpectrumSample> samples,
                                     bool exclude_trivial) {
  std::vector<double> pooled;
  for (const auto& s : samples) {
    for (std::size_t i = 0; i < s.eigenvalues.size(); ++i) {
      if (exclude_trivial && s.trivial_flags[i]) continue;
      pooled.push_back(s.eigenvalues[i]);
    }
  }
  std::sort(pooled.begin(), pooled.end());
  return pooled;
}

double ks_statistic(std::span<const double> sorted, const SpectralLaw& law) {
  if (sorted.empty()) throw std::invalid_argument("ks_statistic: empty sample");
  const auto cdf = law_cdf_sorted(law, sorted);
  const double n = static_cast<double>(sorted.size());
  double sup = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double above = static_cast<double>(i + 1) / n - cdf[i];
    const double below = cdf[i] - static_cast<double>(i) / n;
    sup = std::max({sup, above, below});
  }
  return sup;
}

double ks_distance(std::span<const SpectrumSample> samples, const DensityParams& p,
                   bool exclude_trivial) {
  const auto pooled = pool_eigenvalues(samples, exclude_trivial);
  if (pooled.empty()) throw std::invalid_argument("ks_distance: empty pool after exclusion");
  return ks_statistic(pooled, regular_law(p));
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double sup = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    sup = std::max(sup, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return sup;
}

std::vector<HistogramBin> histogram(std::span<const double> values, double lo, double hi,
                                    std::size_t bins) {
  if (bins == 0 || !(hi > lo)) throw std::invalid_argument("histogram: bad range or bin count");
  const double width = (hi - lo) / static_cast<double>(bins);
  std::vector<std::size_t> counts(bins, 0);
  for (const double v : values) {
    if (v < lo || v > hi) continue;
    auto k = static_cast<std::size_t>((v - lo) / width);
    if (k >= bins) k = bins - 1;
    ++counts[k];
  }
  std::vector<HistogramBin> out(bins);
  const double total = values.empty() ? 1.0 : static_cast<double>(values.size());
  for (std::size_t k = 0; k < bins; ++k) {
    out[k].center = lo + (static_cast<double>(k) + 0.5) * width;
    out[k].density = static_cast<double>(counts[k]) / (total * width);
  }
  return out;
}

} // namespace ldnoma

#pragma once

#include "ldnoma/graphgen.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace ldnoma {

// Load beta = K/N and sparsity d, with the derived support of the limiting
// eigenvalue law of A A^T / d.
struct DensityParams {
  double beta = 1.0;
  double d = 2.0;
  double alpha = 0.5;   // (d - 1) / d
  double gamma = 0.5;   // (beta d - 1) / d
  double lambda_minus = 0.0;
  double lambda_plus = 2.0;

  // Throws std::invalid_argument unless beta >= 1 and d > 1 (both finite).
  static DensityParams make(double beta, double d);
};

// Limiting density of the eigenvalues of A A^T / d for (d, beta d)-regular A.
// Zero outside (lambda_minus, lambda_plus), including at the edges.
double analytic_density(double lambda, const DensityParams& p);

// The beta = 1 special case written in its own closed form. Zero at the
// support edges.
double kesten_mckay_density(double lambda, double d);

// Dense-spreading (d -> infinity) law on [(1 - sqrt(beta))^2, (1 + sqrt(beta))^2].
double marchenko_pastur_density(double lambda, double beta);

// A density on a bounded support with square-root (or inverse square-root)
// edge behaviour; the common currency of the CDF, KS and throughput code.
struct SpectralLaw {
  double lo = 0.0;
  double hi = 0.0;
  std::function<double(double)> density;
};

SpectralLaw regular_law(const DensityParams& p);
SpectralLaw marchenko_pastur_law(double beta);

// Integral of the law's density from lo to lambda.
double law_cdf(const SpectralLaw& law, double lambda);

// CDF at every point of an ascending sequence, accumulated segment by
// segment in the edge-substituted variable. Much cheaper than law_cdf per
// point for large pooled samples.
std::vector<double> law_cdf_sorted(const SpectralLaw& law, std::span<const double> sorted);

double analytic_cdf(double lambda, const DensityParams& p);

// Eigenvalues of A A^T / d for one realization.
struct SpectrumSample {
  std::vector<double> eigenvalues;  // ascending
  std::vector<bool> trivial_flags;  // known finite-N artifacts
  std::uint64_t realization = 0;
};

class EigenSolverError : public std::runtime_error {
public:
  EigenSolverError(const std::string& what, std::uint64_t realization)
      : std::runtime_error(what), realization_(realization) {}
  std::uint64_t realization() const { return realization_; }

private:
  std::uint64_t realization_;
};

// Dense (1/d) A A^T.
std::vector<double> gram_matrix(const SparseSignatureMatrix& a);

// Full symmetric eigendecomposition of the dense Gram matrix. In ONES mode
// eigenvalues within 1e-6 of beta*d (the Perron eigenvalue) are flagged.
SpectrumSample empirical_spectrum(const SparseSignatureMatrix& a, std::uint64_t realization = 0);

// Concatenates eigenvalues in the given order, optionally without flagged
// ones, and sorts the result.
std::vector<double> pool_eigenvalues(std::span<const SpectrumSample> samples, bool exclude_trivial);

// sup |F_empirical - F_law| over a sorted sample.
double ks_statistic(std::span<const double> sorted, const SpectralLaw& law);

// Pools the samples and compares against the regular law of p. Throws
// std::invalid_argument when nothing remains after exclusion.
double ks_distance(std::span<const SpectrumSample> samples, const DensityParams& p,
                   bool exclude_trivial);

// Two-sample KS distance between two sorted pools.
double ks_two_sample(std::span<const double> a, std::span<const double> b);

struct HistogramBin {
  double center = 0.0;
  double density = 0.0;  // count / (total * width)
};

// Equal-width bins over [lo, hi]; values outside still count toward total.
std::vector<HistogramBin> histogram(std::span<const double> values, double lo, double hi,
                                    std::size_t bins);

} // namespace ldnoma

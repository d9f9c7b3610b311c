#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace ldnoma {

// Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Nodes by Newton iteration on P_n from Chebyshev initial guesses.
GaussLegendreRule gauss_legendre(std::size_t n);

// Cached rule for n = 16 * 2^k, k = 0..8.
const GaussLegendreRule& cached_rule(std::size_t n);

double integrate_fixed(const std::function<double(double)>& f, double a, double b,
                       const GaussLegendreRule& rule);

struct QuadratureResult {
  double value = 0.0;
  std::size_t nodes = 0;  // nodes of the accepted estimate
  bool converged = false;
};

struct QuadratureOptions {
  double abs_tol = 1e-12;
  std::size_t min_nodes = 16;
  std::size_t max_nodes = 4096;
};

// Doubles the Gauss-Legendre node count until two successive estimates
// differ by less than abs_tol.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    const QuadratureOptions& opts = {});

// Integral of f over [lo, upper] (upper <= hi) for f with square-root or
// inverse-square-root behaviour at lo and hi. Substitutes
// lambda = lo + (hi - lo) sin^2(theta), which makes such integrands smooth on
// [0, pi/2]. f is never evaluated at lo or hi.
QuadratureResult integrate_sqrt_edges(const std::function<double(double)>& f, double lo,
                                      double hi, double upper,
                                      const QuadratureOptions& opts = {});

struct EdgePoint {
  double lambda = 0.0;
  double jacobian = 0.0;  // d lambda / d theta
};

// lambda(theta) = lo + (hi - lo) sin^2(theta) for theta in [0, pi/2].
EdgePoint edge_substitution(double theta, double lo, double hi);

inline QuadratureResult integrate_sqrt_edges(const std::function<double(double)>& f, double lo,
                                             double hi, const QuadratureOptions& opts = {}) {
  return integrate_sqrt_edges(f, lo, hi, hi, opts);
}

} // namespace ldnoma

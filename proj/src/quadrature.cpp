#include "ldnoma/quadrature.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ldnoma {

GaussLegendreRule gauss_legendre(std::size_t n) {
  if (n == 0) throw std::invalid_argument("gauss_legendre: n must be positive");
  GaussLegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double dn = static_cast<double>(n);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (dn + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double dk = static_cast<double>(k);
        const double p2 = ((2.0 * dk - 1.0) * x * p1 - (dk - 1.0) * p0) / dk;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = dn * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0, p1 = x;
    for (std::size_t k = 2; k <= n; ++k) {
      const double dk = static_cast<double>(k);
      const double p2 = ((2.0 * dk - 1.0) * x * p1 - (dk - 1.0) * p0) / dk;
      p0 = p1;
      p1 = p2;
    }
    dp = (n == 1) ? 1.0 : dn * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

const GaussLegendreRule& cached_rule(std::size_t n) {
  static const std::array<GaussLegendreRule, 9> rules = [] {
    std::array<GaussLegendreRule, 9> r;
    for (std::size_t k = 0; k < r.size(); ++k) r[k] = gauss_legendre(std::size_t{16} << k);
    return r;
  }();
  for (const auto& r : rules) {
    if (r.nodes.size() == n) return r;
  }
  throw std::invalid_argument("cached_rule: unsupported node count");
}

double integrate_fixed(const std::function<double(double)>& f, double a, double b,
                       const GaussLegendreRule& rule) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (b + a);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  }
  return half * sum;
}

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    const QuadratureOptions& opts) {
  QuadratureResult res;
  std::size_t n = opts.min_nodes;
  double prev = integrate_fixed(f, a, b, cached_rule(n));
  while (2 * n <= opts.max_nodes) {
    n *= 2;
    const double cur = integrate_fixed(f, a, b, cached_rule(n));
    if (std::abs(cur - prev) < opts.abs_tol) {
      res.value = cur;
      res.nodes = n;
      res.converged = true;
      return res;
    }
    prev = cur;
  }
  res.value = prev;
  res.nodes = n;
  return res;
}

QuadratureResult integrate_sqrt_edges(const std::function<double(double)>& f, double lo,
                                      double hi, double upper, const QuadratureOptions& opts) {
  if (!(hi > lo)) return QuadratureResult{0.0, 0, true};
  if (upper <= lo) return QuadratureResult{0.0, 0, true};
  if (upper > hi) upper = hi;
  const double width = hi - lo;
  const double theta_max = std::asin(std::sqrt(std::min(1.0, (upper - lo) / width)));
  auto g = [&](double theta) {
    const auto [lambda, jacobian] = edge_substitution(theta, lo, hi);
    return f(lambda) * jacobian;
  };
  return integrate_adaptive(g, 0.0, theta_max, opts);
}

EdgePoint edge_substitution(double theta, double lo, double hi) {
  const double width = hi - lo;
  const double s = std::sin(theta);
  const double c = std::cos(theta);
  // Measure from the nearer edge so the small gap keeps full precision.
  const double lambda = theta < 0.25 * std::numbers::pi ? lo + width * s * s : hi - width * c * c;
  // d lambda / d theta from the rounded lambda itself, so that a density
  // behaving like 1/sqrt((lambda - lo)(hi - lambda)) cancels exactly.
  return EdgePoint{lambda, 2.0 * std::sqrt(std::max(0.0, (lambda - lo) * (hi - lambda)))};
}

} // namespace ldnoma
